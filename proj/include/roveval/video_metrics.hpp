#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

// Consistency of one T-frame window: |(∩ preds) ∩ (∩ gts)| / |∩ gts| as a
// fraction, or nullopt when the GT intersection is empty (window skipped).
// Masks must already be restricted to valid pixels (VOID excluded).
std::optional<double> vc_window(std::span<const BinaryMask> preds,
                                std::span<const BinaryMask> gts);

struct VideoMetricsConfig {
  int window = 8;
  int stride = 1;
};

// Mean of vc_window over all stride-spaced placements; nullopt when every
// window was skipped. Throws SequenceTooShort when len < window.
std::optional<double> vc_sequence(const std::vector<BinaryMask>& preds,
                                  const std::vector<BinaryMask>& gts,
                                  const VideoMetricsConfig& cfg);

// Same on the complemented masks restricted to valid pixels:
// pred_bg = valid \ pred, gt_bg = valid \ gt. The valid masks carry the
// VOID information the obstacle masks no longer have.
std::optional<double> vc_background(const std::vector<BinaryMask>& preds,
                                    const std::vector<BinaryMask>& gts,
                                    const std::vector<BinaryMask>& valids,
                                    const VideoMetricsConfig& cfg);

// Harmonic mean in the inputs' unit (fraction in, fraction out; percent in,
// percent out). 0 whenever either side is 0 or undefined.
double vc_star(std::optional<double> vc_ro, std::optional<double> vc_bg);

// Per-sequence outcome. windows_* count obstacle-variant placements,
// bg_windows_* the background variant; each pair sums to the number of
// window placements.
struct VideoConsistencyResult {
  std::optional<double> vc_ro;  // percent
  std::optional<double> vc_bg;  // percent
  double vc_star = 0.0;         // percent
  std::int64_t windows_evaluated = 0;
  std::int64_t windows_skipped = 0;
  std::int64_t bg_windows_evaluated = 0;
  std::int64_t bg_windows_skipped = 0;
  int window_length = 0;
  int stride = 0;
  // True when the undefined-to-0 convention fired: a variant had no
  // evaluable window, so vc_star was forced to 0 rather than computed.
  bool vc_star_collapsed = false;
};

// Streaming evaluator: feed frames in order, windows are scored as soon as
// they complete. Masks are packed into 64-bit words internally so window
// intersections cost ~1/64 of a per-pixel pass.
class VcStream {
 public:
  explicit VcStream(const VideoMetricsConfig& cfg);

  // pred and gt must be valid-restricted; valid marks non-VOID pixels.
  void add_frame(const BinaryMask& pred, const BinaryMask& gt,
                 const BinaryMask& valid);

  std::int64_t frames_seen() const { return frames_seen_; }

  // Throws SequenceTooShort when fewer than `window` frames were added.
  VideoConsistencyResult finalize() const;

 private:
  struct Packed {
    std::vector<std::uint64_t> pred;
    std::vector<std::uint64_t> gt;
    std::vector<std::uint64_t> pred_bg;  // valid & ~pred
    std::vector<std::uint64_t> gt_bg;    // valid & ~gt
  };

  void score_window();

  VideoMetricsConfig cfg_;
  int width_ = 0;
  int height_ = 0;
  std::vector<Packed> ring_;
  std::int64_t frames_seen_ = 0;
  double ro_sum_ = 0.0;
  double bg_sum_ = 0.0;
  std::int64_t ro_evaluated_ = 0;
  std::int64_t ro_skipped_ = 0;
  std::int64_t bg_evaluated_ = 0;
  std::int64_t bg_skipped_ = 0;
};

// Unweighted average over sequences. nullopt entries mark sequences that
// were too short to host a single window; they are counted, not averaged.
// vc_ro / vc_bg average only over sequences where the variant was defined;
// vc_star averages over every evaluated sequence.
struct VideoAggregate {
  std::optional<double> vc_ro;  // percent
  std::optional<double> vc_bg;  // percent
  double vc_star = 0.0;         // percent
  std::int64_t sequences_evaluated = 0;
  std::int64_t sequences_skipped_short = 0;
  std::int64_t windows_evaluated = 0;
  std::int64_t windows_skipped = 0;
  std::int64_t bg_windows_evaluated = 0;
  std::int64_t bg_windows_skipped = 0;
  int window_length = 0;
  int stride = 0;
  bool vc_star_collapsed = false;
};

VideoAggregate aggregate_sequences(
    const std::vector<std::optional<VideoConsistencyResult>>& per_sequence,
    const VideoMetricsConfig& cfg);

}  // namespace roveval
