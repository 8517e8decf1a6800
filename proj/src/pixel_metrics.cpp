#include "roveval/pixel_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roveval/errors.hpp"

namespace roveval {

namespace {

// One descending-score tie group: counts of positives and negatives that
// share the group's score range.
struct Group {
  std::int64_t pos = 0;
  std::int64_t neg = 0;
};

// Shared sweep core. `groups` must be ordered by descending score.
PixelMetrics metrics_from_groups(const std::vector<Group>& groups) {
  std::int64_t total_pos = 0;
  std::int64_t total_neg = 0;
  for (const Group& g : groups) {
    total_pos += g.pos;
    total_neg += g.neg;
  }
  if (total_pos == 0 || total_neg == 0) {
    fail(ErrorCode::EmptyEvaluationDomain,
         "pixel metrics need at least one obstacle and one background pixel");
  }

  const double p = static_cast<double>(total_pos);
  const double n = static_cast<double>(total_neg);

  std::int64_t tp = 0;
  std::int64_t fp = 0;
  double u_sum = 0.0;        // Mann-Whitney numerator (ties count 1/2)
  double ap = 0.0;           // step-wise average precision
  double fpr95 = -1.0;
  double prev_tpr = 0.0;
  double prev_fpr = 0.0;
  for (const Group& g : groups) {
    if (g.pos == 0 && g.neg == 0) continue;
    u_sum += static_cast<double>(g.neg) *
             (static_cast<double>(tp) + 0.5 * static_cast<double>(g.pos));
    tp += g.pos;
    fp += g.neg;
    const double tpr = static_cast<double>(tp) / p;
    const double fpr = static_cast<double>(fp) / n;
    if (g.pos > 0) {
      ap += (static_cast<double>(g.pos) / p) *
            (static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    if (fpr95 < 0.0 && tpr >= 0.95) {
      if (tpr == prev_tpr) {
        fpr95 = fpr;
      } else {
        fpr95 = prev_fpr + (fpr - prev_fpr) * (0.95 - prev_tpr) / (tpr - prev_tpr);
      }
    }
    prev_tpr = tpr;
    prev_fpr = fpr;
  }

  PixelMetrics m;
  m.num_pos = total_pos;
  m.num_neg = total_neg;
  m.auroc = 100.0 * u_sum / (p * n);
  m.auprc = 100.0 * ap;
  m.fpr95 = 100.0 * (fpr95 < 0.0 ? 1.0 : fpr95);
  return m;
}

}  // namespace

PixelAccumulator::PixelAccumulator(int bins, double lo, double hi) {
  if (bins < 1 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    fail(ErrorCode::BadBinEdges,
         "accumulator needs bins >= 1 and a finite range with min < max");
  }
  num_bins = bins;
  score_min = lo;
  score_max = hi;
  pos_counts.assign(static_cast<std::size_t>(bins), 0);
  neg_counts.assign(static_cast<std::size_t>(bins), 0);
}

std::int64_t PixelAccumulator::num_pos() const {
  return std::accumulate(pos_counts.begin(), pos_counts.end(), std::int64_t{0}) +
         clipped_low_pos + clipped_high_pos;
}

std::int64_t PixelAccumulator::num_neg() const {
  return std::accumulate(neg_counts.begin(), neg_counts.end(), std::int64_t{0}) +
         clipped_low_neg + clipped_high_neg;
}

void accumulate(PixelAccumulator& acc, const ScoreMap& scores,
                const LabelMask& labels) {
  if (acc.num_bins < 1) {
    fail(ErrorCode::BadBinEdges, "accumulate on an uninitialized accumulator");
  }
  require_same_dims(scores, labels, "score map", "label mask");
  const std::size_t pixels = scores.scores.size();
  const double lo = acc.score_min;
  const double span = acc.score_max - acc.score_min;
  const double scale = acc.num_bins / span;
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint8_t label = labels.labels[i];
    if (label == kVoid) continue;
    const bool positive = (label == kObstacle);
    const double s = scores.scores[i];
    if (s < lo) {
      (positive ? acc.clipped_low_pos : acc.clipped_low_neg) += 1;
      continue;
    }
    if (s > acc.score_max) {
      (positive ? acc.clipped_high_pos : acc.clipped_high_neg) += 1;
      continue;
    }
    int bin = static_cast<int>((s - lo) * scale);
    bin = std::clamp(bin, 0, acc.num_bins - 1);
    (positive ? acc.pos_counts : acc.neg_counts)[static_cast<std::size_t>(bin)] += 1;
  }
}

PixelAccumulator merge(const PixelAccumulator& a, const PixelAccumulator& b) {
  if (a.num_bins != b.num_bins || a.score_min != b.score_min ||
      a.score_max != b.score_max) {
    fail(ErrorCode::IncompatibleAccumulators,
         "accumulators differ in bin count or score range");
  }
  PixelAccumulator out = a;
  for (int i = 0; i < out.num_bins; ++i) {
    out.pos_counts[i] += b.pos_counts[i];
    out.neg_counts[i] += b.neg_counts[i];
  }
  out.clipped_low_pos += b.clipped_low_pos;
  out.clipped_low_neg += b.clipped_low_neg;
  out.clipped_high_pos += b.clipped_high_pos;
  out.clipped_high_neg += b.clipped_high_neg;
  return out;
}

PixelMetrics finalize(const PixelAccumulator& acc) {
  std::vector<Group> groups;
  groups.reserve(static_cast<std::size_t>(acc.num_bins) + 2);
  groups.push_back({acc.clipped_high_pos, acc.clipped_high_neg});
  for (int b = acc.num_bins - 1; b >= 0; --b) {
    groups.push_back({acc.pos_counts[b], acc.neg_counts[b]});
  }
  groups.push_back({acc.clipped_low_pos, acc.clipped_low_neg});
  return metrics_from_groups(groups);
}

PixelMetrics exact_metrics(const std::vector<float>& scores,
                           const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::DimensionMismatch,
         "exact_metrics: scores and labels differ in length");
  }
  std::vector<std::uint32_t> order;
  order.reserve(scores.size());
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != kVoid) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] > scores[b];
  });

  std::vector<Group> groups;
  std::size_t i = 0;
  while (i < order.size()) {
    const float s = scores[order[i]];
    Group g;
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] == kObstacle ? g.pos : g.neg) += 1;
    }
    groups.push_back(g);
  }
  return metrics_from_groups(groups);
}

double tpr95_threshold(const PixelAccumulator& acc) {
  const std::int64_t total_pos = acc.num_pos();
  if (total_pos == 0) {
    fail(ErrorCode::EmptyEvaluationDomain,
         "tpr95 threshold needs at least one obstacle pixel");
  }
  const double needed = 0.95 * static_cast<double>(total_pos);
  std::int64_t tp = acc.clipped_high_pos;
  if (static_cast<double>(tp) >= needed) {
    return acc.score_max;
  }
  const double bin_width = (acc.score_max - acc.score_min) / acc.num_bins;
  for (int b = acc.num_bins - 1; b >= 0; --b) {
    tp += acc.pos_counts[b];
    if (static_cast<double>(tp) >= needed) {
      return acc.score_min + b * bin_width;
    }
  }
  // Only clipped-low positives remain; every finite threshold below the
  // range captures them.
  return acc.score_min;
}

}  // namespace roveval
