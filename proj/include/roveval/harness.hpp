#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roveval/component_metrics.hpp"
#include "roveval/manifest.hpp"
#include "roveval/report.hpp"
#include "roveval/scoring.hpp"
#include "roveval/video_metrics.hpp"

namespace roveval {

// How score maps turn into the binary predictions of the video metrics:
// either a fixed threshold on [0,1]-normalized scores, or the threshold at
// which the pooled pixel sweep reaches 95% TPR.
enum class VideoThetaMode { Normalized, Tpr95 };

struct EvalConfig {
  bool run_pixel = true;
  bool run_component = true;
  bool run_video = true;

  // "precomputed" reads RVS1 maps from the manifest, "random" draws uniform
  // scores from the seed, anything else is a scoring method applied to the
  // manifest's model outputs.
  std::string method = "precomputed";
  ScoringConfig scoring;

  int bins = 4096;
  // Score range for binning and normalization; unset means a first pass
  // discovers the dataset-wide min/max over valid pixels.
  std::optional<std::pair<double, double>> score_range;

  ComponentSweepConfig sweep = default_component_sweep();

  VideoMetricsConfig video;
  VideoThetaMode video_theta_mode = VideoThetaMode::Normalized;
  double video_theta = 0.5;

  std::uint64_t seed = 0;
  int workers = 1;
};

// The canonical configuration string hashed into reports. Worker count is
// deliberately absent: it must never influence results.
std::string canonical_config_string(const EvalConfig& cfg);

// Runs the requested metric families over every sequence, one report per
// distinct dataset name (order of first appearance). Work is split across
// cfg.workers threads at sequence granularity and merged in sequence order,
// so reports are byte-identical for any worker count. A sequence that fails
// to load aborts the whole run with the offending path in the error.
std::vector<MetricReport> run_evaluation(
    const std::vector<SequenceManifest>& manifests, const EvalConfig& cfg);

}  // namespace roveval
