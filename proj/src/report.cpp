#include "roveval/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "roveval/errors.hpp"

namespace roveval {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ordered_json to_json(const PixelMetrics& m) {
  ordered_json j;
  j["auroc"] = m.auroc;
  j["auprc"] = m.auprc;
  j["fpr95"] = m.fpr95;
  j["num_pos"] = m.num_pos;
  j["num_neg"] = m.num_neg;
  return j;
}

ordered_json to_json(const ComponentMetrics& m) {
  ordered_json j;
  j["siou"] = m.siou_mean;
  j["ppv"] = m.ppv_mean;
  j["f1_star"] = m.f1_star;
  j["num_gt_components"] = m.num_gt_components;
  j["num_pred_components"] = m.num_pred_components;
  j["thetas_without_predictions"] = m.thetas_without_predictions;
  ordered_json per = ordered_json::array();
  for (const ThresholdCounts& tc : m.per_threshold) {
    ordered_json row;
    row["tau"] = tc.tau;
    row["tp"] = tc.tp;
    row["fn"] = tc.fn;
    row["fp"] = tc.fp;
    row["f1"] = tc.f1;
    per.push_back(std::move(row));
  }
  j["per_tau"] = std::move(per);
  return j;
}

ordered_json to_json(const VideoAggregate& m) {
  ordered_json j;
  j["vc_ro"] = m.vc_ro ? ordered_json(*m.vc_ro) : ordered_json(nullptr);
  j["vc_bg"] = m.vc_bg ? ordered_json(*m.vc_bg) : ordered_json(nullptr);
  j["vc_star"] = m.vc_star;
  j["window"] = m.window_length;
  j["stride"] = m.stride;
  j["windows_evaluated"] = m.windows_evaluated;
  j["windows_skipped"] = m.windows_skipped;
  j["bg_windows_evaluated"] = m.bg_windows_evaluated;
  j["bg_windows_skipped"] = m.bg_windows_skipped;
  j["sequences_evaluated"] = m.sequences_evaluated;
  j["sequences_skipped_short"] = m.sequences_skipped_short;
  j["vc_star_collapsed"] = m.vc_star_collapsed;
  return j;
}

ordered_json to_json(const MetricReport& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["toolkit_version"] = r.toolkit_version;
  j["config_fingerprint"] = r.config_fingerprint;
  j["pixel"] = r.pixel ? to_json(*r.pixel) : ordered_json(nullptr);
  j["component"] = r.component ? to_json(*r.component) : ordered_json(nullptr);
  j["video"] = r.video ? to_json(*r.video) : ordered_json(nullptr);
  j["notes"] = r.notes;
  return j;
}

PixelMetrics pixel_from_json(const json& j) {
  PixelMetrics m;
  m.auroc = j.at("auroc").get<double>();
  m.auprc = j.at("auprc").get<double>();
  m.fpr95 = j.at("fpr95").get<double>();
  m.num_pos = j.at("num_pos").get<std::int64_t>();
  m.num_neg = j.at("num_neg").get<std::int64_t>();
  return m;
}

ComponentMetrics component_from_json(const json& j) {
  ComponentMetrics m;
  m.siou_mean = j.at("siou").get<double>();
  m.ppv_mean = j.at("ppv").get<double>();
  m.f1_star = j.at("f1_star").get<double>();
  m.num_gt_components = j.at("num_gt_components").get<std::int64_t>();
  m.num_pred_components = j.at("num_pred_components").get<std::int64_t>();
  m.thetas_without_predictions = j.at("thetas_without_predictions").get<int>();
  for (const json& row : j.at("per_tau")) {
    ThresholdCounts tc;
    tc.tau = row.at("tau").get<double>();
    tc.tp = row.at("tp").get<std::int64_t>();
    tc.fn = row.at("fn").get<std::int64_t>();
    tc.fp = row.at("fp").get<std::int64_t>();
    tc.f1 = row.at("f1").get<double>();
    m.per_threshold.push_back(tc);
  }
  return m;
}

VideoAggregate video_from_json(const json& j) {
  VideoAggregate m;
  if (!j.at("vc_ro").is_null()) m.vc_ro = j.at("vc_ro").get<double>();
  if (!j.at("vc_bg").is_null()) m.vc_bg = j.at("vc_bg").get<double>();
  m.vc_star = j.at("vc_star").get<double>();
  m.window_length = j.at("window").get<int>();
  m.stride = j.at("stride").get<int>();
  m.windows_evaluated = j.at("windows_evaluated").get<std::int64_t>();
  m.windows_skipped = j.at("windows_skipped").get<std::int64_t>();
  m.bg_windows_evaluated = j.at("bg_windows_evaluated").get<std::int64_t>();
  m.bg_windows_skipped = j.at("bg_windows_skipped").get<std::int64_t>();
  m.sequences_evaluated = j.at("sequences_evaluated").get<std::int64_t>();
  m.sequences_skipped_short = j.at("sequences_skipped_short").get<std::int64_t>();
  m.vc_star_collapsed = j.at("vc_star_collapsed").get<bool>();
  return m;
}

MetricReport report_from_json(const json& j) {
  MetricReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.toolkit_version = j.at("toolkit_version").get<std::string>();
  r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  if (!j.at("pixel").is_null()) r.pixel = pixel_from_json(j.at("pixel"));
  if (!j.at("component").is_null()) {
    r.component = component_from_json(j.at("component"));
  }
  if (!j.at("video").is_null()) r.video = video_from_json(j.at("video"));
  for (const json& n : j.at("notes")) {
    r.notes.push_back(n.get<std::string>());
  }
  return r;
}

// Dataset and method labels, then the metric columns in table order; "-"
// stands in for families that did not run.
std::vector<std::string> row_cells(const MetricReport& r, bool two_decimals) {
  const auto num = [&](double v) { return two_decimals ? fixed2(v) : fixed6(v); };
  std::vector<std::string> cells;
  cells.push_back(r.dataset);
  cells.push_back(r.method);
  if (r.pixel) {
    cells.push_back(num(r.pixel->auroc));
    cells.push_back(num(r.pixel->auprc));
    cells.push_back(num(r.pixel->fpr95));
  } else {
    cells.insert(cells.end(), {"-", "-", "-"});
  }
  if (r.component) {
    cells.push_back(num(r.component->siou_mean));
    cells.push_back(num(r.component->ppv_mean));
    cells.push_back(num(r.component->f1_star));
  } else {
    cells.insert(cells.end(), {"-", "-", "-"});
  }
  if (r.video) {
    cells.push_back(num(r.video->vc_star));
  } else {
    cells.push_back("-");
  }
  return cells;
}

const char* kColumns[] = {"dataset", "method", "AuROC", "AuPRC", "FPR95",
                          "sIoU",    "PPV",    "F1*",   "VC*"};

std::string render_markdown(const std::vector<MetricReport>& reports) {
  std::ostringstream out;
  out << "|";
  for (const char* c : kColumns) out << " " << c << " |";
  out << "\n|";
  for (const char* c : kColumns) {
    (void)c;
    out << " --- |";
  }
  out << "\n";
  for (const MetricReport& r : reports) {
    out << "|";
    for (const std::string& cell : row_cells(r, true)) {
      out << " " << cell << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    if (i) out << ",";
    out << kColumns[i];
  }
  out << "\n";
  for (const MetricReport& r : reports) {
    const std::vector<std::string> cells = row_cells(r, false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(cells[i]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  fail(ErrorCode::SchemaViolation, "unknown report format '" + name + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string config_fingerprint(std::string_view canonical_config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config)));
  return buf;
}

std::string render_reports(const std::vector<MetricReport>& reports,
                           ReportFormat format) {
  if (reports.empty()) {
    fail(ErrorCode::EmptyEvaluationDomain, "no reports to render");
  }
  switch (format) {
    case ReportFormat::Json: {
      ordered_json arr = ordered_json::array();
      for (const MetricReport& r : reports) arr.push_back(to_json(r));
      return arr.dump(2) + "\n";
    }
    case ReportFormat::Csv:
      return render_csv(reports);
    case ReportFormat::Markdown:
      return render_markdown(reports);
  }
  fail(ErrorCode::SchemaViolation, "unknown report format enum value");
}

void emit_report(const std::vector<MetricReport>& reports, ReportFormat format,
                 const std::string& path) {
  const std::string text = render_reports(reports, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    fail(ErrorCode::IoFailure, "write error on '" + path + "'");
  }
}

std::vector<MetricReport> parse_reports_json(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("report is not valid JSON: ") + e.what());
  }
  std::vector<MetricReport> out;
  try {
    if (root.is_array()) {
      for (const json& j : root) out.push_back(report_from_json(j));
    } else {
      out.push_back(report_from_json(root));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("report JSON missing required fields: ") + e.what());
  }
  return out;
}

std::vector<MetricReport> load_reports(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      fail(ErrorCode::MissingFile, "no such report: '" + path + "'");
    }
    fail(ErrorCode::IoFailure, "cannot open report '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorCode::IoFailure, "read error on '" + path + "'");
  }
  return parse_reports_json(text);
}

}  // namespace roveval
