#include "roveval/video_metrics.hpp"

#include <bit>

#include "roveval/errors.hpp"

namespace roveval {

namespace {

std::vector<std::uint64_t> pack_bits(const BinaryMask& mask) {
  const std::size_t n = mask.bits.size();
  std::vector<std::uint64_t> words((n + 63) / 64, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.bits[i] != 0) {
      words[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
  }
  return words;
}

std::int64_t popcount(const std::vector<std::uint64_t>& words) {
  std::int64_t c = 0;
  for (std::uint64_t w : words) c += std::popcount(w);
  return c;
}

void and_into(std::vector<std::uint64_t>& acc,
              const std::vector<std::uint64_t>& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] &= other[i];
}

// valid & ~src; the valid mask's zero tail keeps padding bits clear.
std::vector<std::uint64_t> complement_within(
    const std::vector<std::uint64_t>& src,
    const std::vector<std::uint64_t>& valid) {
  std::vector<std::uint64_t> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = valid[i] & ~src[i];
  return out;
}

std::optional<double> window_ratio(
    std::span<const std::vector<std::uint64_t>> preds,
    std::span<const std::vector<std::uint64_t>> gts) {
  std::vector<std::uint64_t> gt_inter = gts[0];
  for (std::size_t t = 1; t < gts.size(); ++t) and_into(gt_inter, gts[t]);
  const std::int64_t denom = popcount(gt_inter);
  if (denom == 0) return std::nullopt;
  std::vector<std::uint64_t> num = preds[0];
  for (std::size_t t = 1; t < preds.size(); ++t) and_into(num, preds[t]);
  and_into(num, gt_inter);
  return static_cast<double>(popcount(num)) / static_cast<double>(denom);
}

void check_config(const VideoMetricsConfig& cfg) {
  if (cfg.window < 1 || cfg.stride < 1) {
    fail(ErrorCode::SchemaViolation, "window and stride must be >= 1");
  }
}

}  // namespace

std::optional<double> vc_window(std::span<const BinaryMask> preds,
                                std::span<const BinaryMask> gts) {
  if (preds.size() != gts.size() || preds.empty()) {
    fail(ErrorCode::DimensionMismatch,
         "vc_window needs equally many prediction and GT masks (>= 1)");
  }
  for (std::size_t t = 0; t < preds.size(); ++t) {
    require_same_dims(preds[t], gts[0], "prediction mask", "first GT mask");
    require_same_dims(gts[t], gts[0], "GT mask", "first GT mask");
  }
  std::vector<std::vector<std::uint64_t>> p;
  std::vector<std::vector<std::uint64_t>> g;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    p.push_back(pack_bits(preds[t]));
    g.push_back(pack_bits(gts[t]));
  }
  return window_ratio(p, g);
}

std::optional<double> vc_sequence(const std::vector<BinaryMask>& preds,
                                  const std::vector<BinaryMask>& gts,
                                  const VideoMetricsConfig& cfg) {
  check_config(cfg);
  if (preds.size() != gts.size()) {
    fail(ErrorCode::DimensionMismatch,
         "vc_sequence needs equally many prediction and GT masks");
  }
  if (static_cast<int>(preds.size()) < cfg.window) {
    fail(ErrorCode::SequenceTooShort,
         "sequence of " + std::to_string(preds.size()) +
             " frames cannot host a window of " + std::to_string(cfg.window));
  }
  double sum = 0.0;
  std::int64_t evaluated = 0;
  for (std::size_t start = 0; start + cfg.window <= preds.size();
       start += cfg.stride) {
    const auto r = vc_window(
        std::span<const BinaryMask>(preds.data() + start, cfg.window),
        std::span<const BinaryMask>(gts.data() + start, cfg.window));
    if (r) {
      sum += *r;
      ++evaluated;
    }
  }
  if (evaluated == 0) return std::nullopt;
  return sum / static_cast<double>(evaluated);
}

std::optional<double> vc_background(const std::vector<BinaryMask>& preds,
                                    const std::vector<BinaryMask>& gts,
                                    const std::vector<BinaryMask>& valids,
                                    const VideoMetricsConfig& cfg) {
  if (preds.size() != gts.size() || preds.size() != valids.size()) {
    fail(ErrorCode::DimensionMismatch,
         "vc_background needs aligned prediction, GT, and valid masks");
  }
  std::vector<BinaryMask> pred_bg(preds.size());
  std::vector<BinaryMask> gt_bg(gts.size());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    require_same_dims(preds[t], valids[t], "prediction mask", "valid mask");
    require_same_dims(gts[t], valids[t], "GT mask", "valid mask");
    pred_bg[t] = BinaryMask::filled(valids[t].width, valids[t].height, 0);
    gt_bg[t] = BinaryMask::filled(valids[t].width, valids[t].height, 0);
    for (std::size_t i = 0; i < valids[t].bits.size(); ++i) {
      if (valids[t].bits[i] == 0) continue;
      pred_bg[t].bits[i] = preds[t].bits[i] == 0 ? 1 : 0;
      gt_bg[t].bits[i] = gts[t].bits[i] == 0 ? 1 : 0;
    }
  }
  return vc_sequence(pred_bg, gt_bg, cfg);
}

double vc_star(std::optional<double> vc_ro, std::optional<double> vc_bg) {
  if (!vc_ro || !vc_bg || *vc_ro == 0.0 || *vc_bg == 0.0) return 0.0;
  return 2.0 * (*vc_ro) * (*vc_bg) / (*vc_ro + *vc_bg);
}

VcStream::VcStream(const VideoMetricsConfig& cfg) : cfg_(cfg) {
  check_config(cfg);
  ring_.resize(static_cast<std::size_t>(cfg.window));
}

void VcStream::add_frame(const BinaryMask& pred, const BinaryMask& gt,
                         const BinaryMask& valid) {
  require_same_dims(pred, valid, "prediction mask", "valid mask");
  require_same_dims(gt, valid, "GT mask", "valid mask");
  if (frames_seen_ == 0) {
    width_ = valid.width;
    height_ = valid.height;
  } else if (valid.width != width_ || valid.height != height_) {
    fail(ErrorCode::DimensionMismatch,
         "frame dimensions changed mid-sequence");
  }

  Packed& slot = ring_[static_cast<std::size_t>(frames_seen_ % cfg_.window)];
  slot.pred = pack_bits(pred);
  slot.gt = pack_bits(gt);
  const std::vector<std::uint64_t> v = pack_bits(valid);
  slot.pred_bg = complement_within(slot.pred, v);
  slot.gt_bg = complement_within(slot.gt, v);
  ++frames_seen_;

  if (frames_seen_ >= cfg_.window &&
      (frames_seen_ - cfg_.window) % cfg_.stride == 0) {
    score_window();
  }
}

void VcStream::score_window() {
  std::vector<std::vector<std::uint64_t>> preds;
  std::vector<std::vector<std::uint64_t>> gts;
  std::vector<std::vector<std::uint64_t>> preds_bg;
  std::vector<std::vector<std::uint64_t>> gts_bg;
  for (const Packed& p : ring_) {
    preds.push_back(p.pred);
    gts.push_back(p.gt);
    preds_bg.push_back(p.pred_bg);
    gts_bg.push_back(p.gt_bg);
  }
  if (const auto r = window_ratio(preds, gts)) {
    ro_sum_ += *r;
    ++ro_evaluated_;
  } else {
    ++ro_skipped_;
  }
  if (const auto r = window_ratio(preds_bg, gts_bg)) {
    bg_sum_ += *r;
    ++bg_evaluated_;
  } else {
    ++bg_skipped_;
  }
}

VideoConsistencyResult VcStream::finalize() const {
  if (frames_seen_ < cfg_.window) {
    fail(ErrorCode::SequenceTooShort,
         "sequence of " + std::to_string(frames_seen_) +
             " frames cannot host a window of " + std::to_string(cfg_.window));
  }
  VideoConsistencyResult r;
  r.window_length = cfg_.window;
  r.stride = cfg_.stride;
  r.windows_evaluated = ro_evaluated_;
  r.windows_skipped = ro_skipped_;
  r.bg_windows_evaluated = bg_evaluated_;
  r.bg_windows_skipped = bg_skipped_;
  if (ro_evaluated_ > 0) {
    r.vc_ro = 100.0 * ro_sum_ / static_cast<double>(ro_evaluated_);
  }
  if (bg_evaluated_ > 0) {
    r.vc_bg = 100.0 * bg_sum_ / static_cast<double>(bg_evaluated_);
  }
  r.vc_star = vc_star(r.vc_ro, r.vc_bg);
  r.vc_star_collapsed = !r.vc_ro.has_value() || !r.vc_bg.has_value();
  return r;
}

VideoAggregate aggregate_sequences(
    const std::vector<std::optional<VideoConsistencyResult>>& per_sequence,
    const VideoMetricsConfig& cfg) {
  if (per_sequence.empty()) {
    fail(ErrorCode::EmptyEvaluationDomain, "no sequences to aggregate");
  }
  VideoAggregate agg;
  agg.window_length = cfg.window;
  agg.stride = cfg.stride;
  double ro_sum = 0.0;
  std::int64_t ro_n = 0;
  double bg_sum = 0.0;
  std::int64_t bg_n = 0;
  double star_sum = 0.0;
  for (const auto& seq : per_sequence) {
    if (!seq) {
      ++agg.sequences_skipped_short;
      continue;
    }
    ++agg.sequences_evaluated;
    agg.windows_evaluated += seq->windows_evaluated;
    agg.windows_skipped += seq->windows_skipped;
    agg.bg_windows_evaluated += seq->bg_windows_evaluated;
    agg.bg_windows_skipped += seq->bg_windows_skipped;
    if (seq->vc_ro) {
      ro_sum += *seq->vc_ro;
      ++ro_n;
    }
    if (seq->vc_bg) {
      bg_sum += *seq->vc_bg;
      ++bg_n;
    }
    star_sum += seq->vc_star;
    agg.vc_star_collapsed = agg.vc_star_collapsed || seq->vc_star_collapsed;
  }
  if (agg.sequences_evaluated == 0) {
    fail(ErrorCode::SequenceTooShort,
         "every sequence is shorter than the window length");
  }
  if (ro_n > 0) agg.vc_ro = ro_sum / static_cast<double>(ro_n);
  if (bg_n > 0) agg.vc_bg = bg_sum / static_cast<double>(bg_n);
  agg.vc_star = star_sum / static_cast<double>(agg.sequences_evaluated);
  return agg;
}

}  // namespace roveval
