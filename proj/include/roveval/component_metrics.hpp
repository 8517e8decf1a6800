#pragma once

#include <cstdint>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

// Connected components of a binary mask. component_id is 0 for background
// and 1..num_components for foreground; ids are assigned in raster order of
// each component's first pixel, so labeling is deterministic.
struct ComponentSet {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> component_id;
  int num_components = 0;
  std::vector<std::int64_t> sizes;  // sizes[k-1] = pixel count of component k
};

struct ThresholdCounts {
  double tau = 0.0;
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  double f1 = 0.0;  // percent
};

struct ComponentMetrics {
  double siou_mean = 0.0;  // percent, mean over pooled GT components
  double ppv_mean = 0.0;   // percent, mean over pooled predicted components
  double f1_star = 0.0;    // percent, mean over the tau grid
  std::vector<ThresholdCounts> per_threshold;
  std::int64_t num_gt_components = 0;
  std::int64_t num_pred_components = 0;
  // Number of binarization thresholds at which the prediction pool was
  // empty; PPV contributes 0 there by convention.
  int thetas_without_predictions = 0;
};

// bit(x) = score(x) >= theta.
BinaryMask binarize(const ScoreMap& scores, double theta);
// Same, with VOID pixels of `labels` forced to false so predictions never
// extend into ignored regions.
BinaryMask binarize(const ScoreMap& scores, const LabelMask& labels, double theta);

// Obstacle pixels of a label mask as a binary mask.
BinaryMask obstacle_mask(const LabelMask& labels);

// Run-based labeling; connectivity is 4 or 8.
ComponentSet connected_components(const BinaryMask& mask, int connectivity = 8);

// Adjusted sIoU per GT component, as fractions in [0,1]. For a GT component
// g, the union counts the predicted components touching g but excludes their
// pixels that land on other GT components. Throws NoGroundTruthComponents
// when gt has none.
std::vector<double> adjusted_siou(const ComponentSet& gt, const BinaryMask& gt_all,
                                  const BinaryMask& pred);

// PPV per predicted component, as fractions; empty vector when there are no
// predicted components.
std::vector<double> ppv(const ComponentSet& pred, const BinaryMask& gt_all);

// TP/FN/FP counting at each tau over pooled per-component values:
// TP = #{sIoU > tau}, FN = #GT - TP, FP = #{PPV <= tau}. F1 = 0 when all
// three are 0. Thresholds must lie in (0,1).
ComponentMetrics f1_star(const std::vector<double>& sious,
                         const std::vector<double>& ppvs,
                         const std::vector<double>& tau_set);

struct ComponentSweepConfig {
  std::vector<double> theta_set;  // binarization grid on normalized scores
  std::vector<double> tau_set;    // matching grid on sIoU/PPV
  int connectivity = 8;
  std::int64_t min_component_size = 0;  // applied to predictions only
};

// {0.25, 0.30, ..., 0.75}.
std::vector<double> default_threshold_grid();
ComponentSweepConfig default_component_sweep();

// Streaming pool over frames for a fixed normalization range. Thetas are
// mapped onto raw scores as min + theta*(max-min), so frames are binarized
// without materializing normalized copies. Per-theta component values pool
// in frame order; merging pools concatenates, keeping results independent
// of how frames were partitioned across workers as long as merge order is
// fixed.
class ComponentPool {
 public:
  ComponentPool(const ComponentSweepConfig& cfg, double score_min,
                double score_max);

  void add_frame(const ScoreMap& scores, const LabelMask& labels);
  void merge(const ComponentPool& other);
  ComponentMetrics finalize() const;

  const ComponentSweepConfig& config() const { return cfg_; }

 private:
  ComponentSweepConfig cfg_;
  std::vector<double> raw_thetas_;
  std::vector<std::vector<double>> sious_;  // [theta index][pooled GT comp]
  std::vector<std::vector<double>> ppvs_;   // [theta index][pooled pred comp]
};

// Convenience wrapper: normalizes over the given frames' valid pixels and
// pools them in order.
ComponentMetrics sweep(const std::vector<ScoreMap>& scores,
                       const std::vector<LabelMask>& gts,
                       const ComponentSweepConfig& cfg);

}  // namespace roveval
