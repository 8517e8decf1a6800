#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roveval/component_metrics.hpp"
#include "roveval/pixel_metrics.hpp"
#include "roveval/video_metrics.hpp"

namespace roveval {

inline constexpr const char* kToolkitVersion = "0.1.0";

// One evaluated (dataset, method) combination. Families that were not run
// stay empty. notes records the conventions that fired during evaluation
// (pooling mode, skipped sequences, forced-zero VC*), so a report is
// interpretable on its own.
struct MetricReport {
  std::string dataset;
  std::string method;
  std::string toolkit_version = kToolkitVersion;
  std::string config_fingerprint;
  std::optional<PixelMetrics> pixel;
  std::optional<ComponentMetrics> component;
  std::optional<VideoAggregate> video;
  std::vector<std::string> notes;
};

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat parse_report_format(const std::string& name);

std::uint64_t fnv1a64(std::string_view bytes);

// 16 hex digits of fnv1a64 over the canonical configuration string.
std::string config_fingerprint(std::string_view canonical_config);

// JSON is the canonical machine format: an array of report objects with
// stable key order and full-precision numbers, so parsing it back yields
// the original reports. CSV and markdown are presentation formats with one
// row per report and the metric columns in the order AuROC, AuPRC, FPR95,
// sIoU, PPV, F1*, VC* (percent, 2 decimals in markdown).
std::string render_reports(const std::vector<MetricReport>& reports,
                           ReportFormat format);

void emit_report(const std::vector<MetricReport>& reports, ReportFormat format,
                 const std::string& path);

std::vector<MetricReport> parse_reports_json(const std::string& json_text);
std::vector<MetricReport> load_reports(const std::string& path);

}  // namespace roveval
