// Command-line front end: evaluate, score, curate, synth, report, stats.
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roveval/curation.hpp"
#include "roveval/errors.hpp"
#include "roveval/harness.hpp"
#include "roveval/manifest.hpp"
#include "roveval/pgm.hpp"
#include "roveval/report.hpp"
#include "roveval/score_io.hpp"
#include "roveval/scoring.hpp"
#include "roveval/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace roveval;

// "lo:hi" -> pair of doubles.
std::pair<double, double> parse_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    fail(ErrorCode::SchemaViolation,
         "range must look like <lo>:<hi>, got '" + text + "'");
  }
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::SchemaViolation, "cannot parse range '" + text + "'");
  }
}

// "start:end:step" -> inclusive grid; a single number is a one-point grid.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t colon = text.find(':', pos);
    const std::string piece =
        text.substr(pos, colon == std::string::npos ? std::string::npos
                                                    : colon - pos);
    try {
      parts.push_back(std::stod(piece));
    } catch (const std::exception&) {
      fail(ErrorCode::SchemaViolation, "cannot parse threshold grid '" + text + "'");
    }
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
    fail(ErrorCode::SchemaViolation,
         "threshold grid must be <value> or <start>:<end>:<step>");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = parts[0] + i * parts[2];
    if (v > parts[1] + 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoFailure, "cannot open '" + out_path + "' for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    fail(ErrorCode::IoFailure, "write error on '" + out_path + "'");
  }
}

struct EvaluateArgs {
  std::string manifest;
  std::string out;
  std::string format = "json";
  std::string method = "precomputed";
  bool pixel = false;
  bool component = false;
  bool video = false;
  int bins = 4096;
  std::string range = "auto";
  std::string theta = "0.25:0.75:0.05";
  std::string tau = "0.25:0.75:0.05";
  int connectivity = 8;
  std::int64_t min_component_size = 0;
  int window = 8;
  int stride = 1;
  std::string bin_theta = "0.5";
  bool softmax_c = false;
  bool sigmoid_m = false;
  bool drop_no_object = false;
  int void_index = -1;
  std::uint64_t seed = 0;
  int workers = 1;
};

int run_evaluate(const EvaluateArgs& a) {
  EvalConfig cfg;
  // Family flags are opt-in: none given means run everything.
  if (a.pixel || a.component || a.video) {
    cfg.run_pixel = a.pixel;
    cfg.run_component = a.component;
    cfg.run_video = a.video;
  }
  cfg.method = a.method;
  cfg.scoring.apply_softmax_to_C = a.softmax_c;
  cfg.scoring.apply_logistic_to_M = a.sigmoid_m;
  cfg.scoring.drop_no_object_column = a.drop_no_object;
  if (a.void_index >= 0) cfg.scoring.void_index = a.void_index;
  cfg.bins = a.bins;
  if (a.range != "auto") cfg.score_range = parse_range(a.range);
  cfg.sweep.theta_set = parse_grid(a.theta);
  cfg.sweep.tau_set = parse_grid(a.tau);
  cfg.sweep.connectivity = a.connectivity;
  cfg.sweep.min_component_size = a.min_component_size;
  cfg.video.window = a.window;
  cfg.video.stride = a.stride;
  if (a.bin_theta == "tpr95") {
    cfg.video_theta_mode = VideoThetaMode::Tpr95;
  } else {
    cfg.video_theta_mode = VideoThetaMode::Normalized;
    try {
      cfg.video_theta = std::stod(a.bin_theta);
    } catch (const std::exception&) {
      fail(ErrorCode::SchemaViolation,
           "--bin-theta must be a number or 'tpr95', got '" + a.bin_theta + "'");
    }
  }
  cfg.seed = a.seed;
  cfg.workers = a.workers;

  const std::vector<SequenceManifest> manifests = load_manifest(a.manifest);
  const std::vector<MetricReport> reports = run_evaluation(manifests, cfg);
  write_text(render_reports(reports, parse_report_format(a.format)), a.out);
  return 0;
}

struct ScoreArgs {
  std::string model_output;
  std::string method = "msp";
  std::string out;
  bool softmax_c = false;
  bool sigmoid_m = false;
  bool drop_no_object = false;
  int void_index = -1;
};

int run_score(const ScoreArgs& a) {
  ScoringConfig cfg;
  cfg.apply_softmax_to_C = a.softmax_c;
  cfg.apply_logistic_to_M = a.sigmoid_m;
  cfg.drop_no_object_column = a.drop_no_object;
  if (a.void_index >= 0) cfg.void_index = a.void_index;

  const MaskTransformerOutput out = load_model_output(a.model_output);
  const ScoreMap map = compute_score(out, parse_scoring_method(a.method), cfg);
  save_score_map(map, a.out);
  return 0;
}

struct CurateArgs {
  std::string instances;
  std::string roads;
  std::int64_t min_size = -1;
  std::string profile;
  std::string out;
  std::string report;
};

nlohmann::ordered_json curation_report_json(const std::string& file,
                                            const CurationReport& rep) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json j;
  j["file"] = file;
  j["kept"] = rep.kept;
  j["removed_small"] = rep.removed_small;
  j["removed_off_road"] = rep.removed_off_road;
  ordered_json instances = ordered_json::array();
  for (const InstanceRecord& r : rep.per_instance) {
    ordered_json e;
    e["id"] = r.id;
    e["size"] = r.size;
    e["centroid"] = {r.center.x, r.center.y};
    e["on_road"] = r.on_road;
    ordered_json hull = ordered_json::array();
    for (const PointD& p : r.hull) hull.push_back({p.x, p.y});
    e["hull"] = std::move(hull);
    e["hull_road_overlap_px"] = r.hull_road_overlap_px;
    instances.push_back(std::move(e));
  }
  j["instances"] = std::move(instances);
  return j;
}

int run_curate(const CurateArgs& a) {
  std::int64_t min_size = a.min_size;
  if (!a.profile.empty()) {
    if (a.min_size >= 0) {
      fail(ErrorCode::SchemaViolation, "--min-size and --profile are exclusive");
    }
    min_size = profile_min_size(a.profile);
  } else if (min_size < 0) {
    min_size = 0;
  }

  // Either two files or two directories with matching .pgm names.
  std::vector<std::pair<std::string, std::string>> jobs;
  if (fs::is_directory(a.instances)) {
    if (!fs::is_directory(a.roads)) {
      fail(ErrorCode::SchemaViolation,
           "--instances is a directory, so --roads must be one too");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.instances)) {
      if (entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      jobs.emplace_back(f.string(), (fs::path(a.roads) / f.filename()).string());
    }
    if (jobs.empty()) {
      fail(ErrorCode::SchemaViolation,
           "no .pgm files under '" + a.instances + "'");
    }
  } else {
    jobs.emplace_back(a.instances, a.roads);
  }

  if (!a.out.empty()) {
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) {
      fail(ErrorCode::IoFailure, "cannot create '" + a.out + "': " + ec.message());
    }
  }

  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& [inst_path, road_path] : jobs) {
    const InstanceMap inst = load_instance_map(inst_path);
    const BinaryMask road = load_road_mask(road_path);
    const auto [filtered, rep] = filter_instances(inst, road, min_size);
    if (!a.out.empty()) {
      const fs::path out_path = fs::path(a.out) / fs::path(inst_path).filename();
      save_instance_map(filtered, out_path.string());
    }
    reports.push_back(curation_report_json(inst_path, rep));
  }
  write_text(reports.dump(2) + "\n", a.report);
  return 0;
}

struct SynthArgs {
  std::string out;
  int width = 64;
  int height = 64;
  int frames = 16;
  int sequences = 1;
  std::string shape = "rectangle";
  int size = 8;
  double velocity = 1.0;
  double p = 1.0;
  double sigma = 0.0;
  double fp_rate = 0.0;
  std::uint64_t seed = 0;
  std::string dataset = "synth";
};

int run_synth(const SynthArgs& a) {
  SynthConfig base;
  base.width = a.width;
  base.height = a.height;
  base.num_frames = a.frames;
  if (a.shape == "rectangle") {
    base.shape = ObstacleShape::Rectangle;
  } else if (a.shape == "disk") {
    base.shape = ObstacleShape::Disk;
  } else {
    fail(ErrorCode::SchemaViolation,
         "--shape must be rectangle or disk, got '" + a.shape + "'");
  }
  base.obstacle_size = a.size;
  base.velocity = a.velocity;
  base.detection_probability = a.p;
  base.score_noise_sigma = a.sigma;
  base.false_positive_rate = a.fp_rate;

  std::vector<SynthConfig> configs;
  for (int s = 0; s < a.sequences; ++s) {
    SynthConfig cfg = base;
    cfg.seed = a.seed + static_cast<std::uint64_t>(s);
    configs.push_back(cfg);
  }
  const std::string manifest = write_synth_dataset(configs, a.dataset, a.out);
  std::cout << manifest << "\n";
  return 0;
}

struct ReportArgs {
  std::string in;
  std::string format = "markdown";
  std::string out;
};

int run_report(const ReportArgs& a) {
  const std::vector<MetricReport> reports = load_reports(a.in);
  write_text(render_reports(reports, parse_report_format(a.format)), a.out);
  return 0;
}

struct StatsArgs {
  std::string manifest;
  std::string out;
};

int run_stats(const StatsArgs& a) {
  const std::vector<SequenceManifest> manifests = load_manifest(a.manifest);
  const DatasetStats stats = manifest_stats(manifests);

  std::ostringstream text;
  text << "dataset: " << manifests.front().dataset_name << "\n";
  text << "sequences: " << stats.num_sequences << "\n";
  text << "frames: " << stats.num_frames << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", stats.avg_sequence_length);
  text << "avg_sequence_length: " << buf << "\n";
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    text << "  " << manifests[i].sequence_id << ": "
         << manifests[i].frames.size() << " frames, "
         << stats.resolutions[i].first << "x" << stats.resolutions[i].second
         << "\n";
  }
  write_text(text.str(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road-obstacle video segmentation evaluation toolkit"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Run metric families over a manifest and emit a report");
  evaluate->add_option("--manifest", ev.manifest, "Dataset manifest JSON")
      ->required();
  evaluate->add_option("--out", ev.out, "Report path (stdout when omitted)");
  evaluate->add_option("--format", ev.format, "json, csv, or markdown");
  evaluate->add_option("--method", ev.method,
                       "precomputed, random, or a scoring method for model outputs");
  evaluate->add_flag("--pixel", ev.pixel, "Run pixel metrics only");
  evaluate->add_flag("--component", ev.component, "Run component metrics only");
  evaluate->add_flag("--video", ev.video, "Run video metrics only");
  evaluate->add_option("--bins", ev.bins, "Histogram bins for pixel metrics");
  evaluate->add_option("--range", ev.range, "Score range, auto or <lo>:<hi>");
  evaluate->add_option("--theta", ev.theta, "Binarization grid <start>:<end>:<step>");
  evaluate->add_option("--tau", ev.tau, "Matching grid <start>:<end>:<step>");
  evaluate->add_option("--connectivity", ev.connectivity, "4 or 8");
  evaluate->add_option("--min-component-size", ev.min_component_size,
                       "Drop predicted components below this size");
  evaluate->add_option("--window", ev.window, "Video consistency window length");
  evaluate->add_option("--stride", ev.stride, "Video window stride");
  evaluate->add_option("--bin-theta", ev.bin_theta,
                       "Video binarization: normalized threshold or 'tpr95'");
  evaluate->add_flag("--softmax-c", ev.softmax_c, "Softmax class scores");
  evaluate->add_flag("--sigmoid-m", ev.sigmoid_m, "Logistic on masks");
  evaluate->add_flag("--drop-no-object", ev.drop_no_object,
                     "Drop the trailing no-object class column");
  evaluate->add_option("--void-index", ev.void_index, "Class index for void scoring");
  evaluate->add_option("--seed", ev.seed, "Seed for the random method");
  evaluate->add_option("--workers", ev.workers, "Worker threads");

  ScoreArgs sc;
  CLI::App* score = app.add_subcommand(
      "score", "Convert a model output file into an anomaly score map");
  score->add_option("--model-output", sc.model_output, "RMT1 input")->required();
  score->add_option("--method", sc.method,
                    "msp, entropy, energy, maxlogit, void, rba, eam, or s2");
  score->add_option("--out", sc.out, "RVS1 output path")->required();
  score->add_flag("--softmax-c", sc.softmax_c, "Softmax class scores");
  score->add_flag("--sigmoid-m", sc.sigmoid_m, "Logistic on masks");
  score->add_flag("--drop-no-object", sc.drop_no_object,
                  "Drop the trailing no-object class column");
  score->add_option("--void-index", sc.void_index, "Class index for void scoring");

  CurateArgs cu;
  CLI::App* curate = app.add_subcommand(
      "curate", "Filter instance maps by size and road-centroid tests");
  curate->add_option("--instances", cu.instances, "Instance map file or directory")
      ->required();
  curate->add_option("--roads", cu.roads, "Road mask file or directory")
      ->required();
  curate->add_option("--min-size", cu.min_size, "Minimum instance size in pixels");
  curate->add_option("--profile", cu.profile,
                     "lidarsod, sos, lostandfound, or asro");
  curate->add_option("--out", cu.out, "Directory for filtered instance maps");
  curate->add_option("--report", cu.report, "Report path (stdout when omitted)");

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic dataset with a moving obstacle");
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--width", sy.width, "Frame width");
  synth->add_option("--height", sy.height, "Frame height");
  synth->add_option("--frames", sy.frames, "Frames per sequence");
  synth->add_option("--sequences", sy.sequences, "Number of sequences");
  synth->add_option("--shape", sy.shape, "rectangle or disk");
  synth->add_option("--size", sy.size, "Obstacle size in pixels");
  synth->add_option("--velocity", sy.velocity, "Pixels per frame");
  synth->add_option("--p", sy.p, "Per-frame detection probability");
  synth->add_option("--sigma", sy.sigma, "Gaussian score noise");
  synth->add_option("--fp-rate", sy.fp_rate, "Per-pixel false positive rate");
  synth->add_option("--seed", sy.seed, "Base seed (sequence s uses seed+s)");
  synth->add_option("--dataset", sy.dataset, "Dataset name in the manifest");

  ReportArgs re;
  CLI::App* report = app.add_subcommand(
      "report", "Re-render a JSON report as json, csv, or markdown");
  report->add_option("--in", re.in, "Report JSON")->required();
  report->add_option("--format", re.format, "json, csv, or markdown");
  report->add_option("--out", re.out, "Output path (stdout when omitted)");

  StatsArgs st;
  CLI::App* stats = app.add_subcommand(
      "stats", "Print sequence/frame counts and resolutions for a manifest");
  stats->add_option("--manifest", st.manifest, "Dataset manifest JSON")
      ->required();
  stats->add_option("--out", st.out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (evaluate->parsed()) return run_evaluate(ev);
    if (score->parsed()) return run_score(sc);
    if (curate->parsed()) return run_curate(cu);
    if (synth->parsed()) return run_synth(sy);
    if (report->parsed()) return run_report(re);
    if (stats->parsed()) return run_stats(st);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ToolkitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_io_error() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
