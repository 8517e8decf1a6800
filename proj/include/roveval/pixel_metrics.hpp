#pragma once

#include <cstdint>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

// Histogram accumulator for pooled ROC/PR metrics. Scores inside
// [score_min, score_max] land in bin floor(B*(s-min)/(max-min)), with
// s == max folded into the top bin. Scores outside the range are counted in
// the clipped_* fields and treated as extreme operating points (above every
// bin / below every bin) at finalize time, so the bookkeeping identity
//   sum(pos) + sum(neg) + clipped = pixels accumulated
// holds exactly and merging stays pure integer arithmetic.
struct PixelAccumulator {
  int num_bins = 0;
  double score_min = 0.0;
  double score_max = 0.0;
  std::vector<std::int64_t> pos_counts;
  std::vector<std::int64_t> neg_counts;
  std::int64_t clipped_low_pos = 0;
  std::int64_t clipped_low_neg = 0;
  std::int64_t clipped_high_pos = 0;
  std::int64_t clipped_high_neg = 0;

  PixelAccumulator() = default;
  // Throws BadBinEdges unless bins >= 1 and lo < hi.
  PixelAccumulator(int bins, double lo, double hi);

  std::int64_t num_pos() const;
  std::int64_t num_neg() const;
};

struct PixelMetrics {
  double auroc = 0.0;   // percent
  double auprc = 0.0;   // percent
  double fpr95 = 0.0;   // percent
  std::int64_t num_pos = 0;
  std::int64_t num_neg = 0;
};

// Adds every non-VOID pixel of the frame to the accumulator.
void accumulate(PixelAccumulator& acc, const ScoreMap& scores,
                const LabelMask& labels);

// Element-wise sum; requires identical binning. Commutative, associative,
// with a default-constructed accumulator of the same shape as identity.
PixelAccumulator merge(const PixelAccumulator& a, const PixelAccumulator& b);

// Descending-threshold sweep over the bins (clipped-high group first,
// clipped-low group last). AuROC by trapezoid, AuPRC as step-wise average
// precision, FPR95 linearly interpolated between the operating points whose
// TPRs bracket 0.95. Throws EmptyEvaluationDomain without both classes.
PixelMetrics finalize(const PixelAccumulator& acc);

// Sort-based reference: groups tied scores into single operating points and
// runs the same sweep as finalize, so inputs quantized to bin centers agree
// with the streaming path exactly. Labels use the LabelMask conventions;
// VOID entries are skipped.
PixelMetrics exact_metrics(const std::vector<float>& scores,
                           const std::vector<std::uint8_t>& labels);

// Smallest binarization threshold theta such that score >= theta captures at
// least 95% of positives, resolved at bin granularity (lower edge of the bin
// where the sweep crosses 95% TPR).
double tpr95_threshold(const PixelAccumulator& acc);

}  // namespace roveval
