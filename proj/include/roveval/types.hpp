#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roveval/errors.hpp"

namespace roveval {

// Label values used in ground-truth masks. VOID marks ignore regions that
// are excluded from every metric.
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kObstacle = 1;
inline constexpr std::uint8_t kVoid = 255;

inline bool is_valid_label_value(std::uint8_t v) {
  return v == kBackground || v == kObstacle || v == kVoid;
}

// Per-frame ground truth, one label per pixel, row-major with the origin at
// the top-left corner.
struct LabelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  static LabelMask filled(int width, int height, std::uint8_t value);
  std::size_t num_pixels() const { return labels.size(); }
  std::uint8_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

// Dense per-pixel anomaly scores; higher means more obstacle-like. Stored as
// 32-bit floats to match the on-disk format bit for bit.
struct ScoreMap {
  int width = 0;
  int height = 0;
  std::vector<float> scores;

  static ScoreMap filled(int width, int height, float value);
  std::size_t num_pixels() const { return scores.size(); }
  float at(int x, int y) const {
    return scores[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) {
    return scores[static_cast<std::size_t>(y) * width + x];
  }
};

// One bit per pixel (stored as bytes), true = obstacle/foreground.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static BinaryMask filled(int width, int height, bool value);
  std::size_t num_pixels() const { return bits.size(); }
  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool value) {
    bits[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
  }
  std::uint64_t count() const;
};

// Per-pixel instance ids, 0 = no instance. Ids follow the 16-bit PGM
// interchange format and need not be contiguous.
struct InstanceMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> ids;

  static InstanceMap filled(int width, int height, std::uint16_t value);
  std::size_t num_pixels() const { return ids.size(); }
  std::uint16_t at(int x, int y) const {
    return ids[static_cast<std::size_t>(y) * width + x];
  }
  std::uint16_t& at(int x, int y) {
    return ids[static_cast<std::size_t>(y) * width + x];
  }
};

// Raw mask-transformer inference output: per-query class scores C (N x K)
// and per-query masks M (N x H*W), both row-major.
struct MaskTransformerOutput {
  int num_queries = 0;   // N
  int num_classes = 0;   // K
  int height = 0;
  int width = 0;
  std::vector<float> class_scores;  // N * K
  std::vector<float> masks;         // N * H * W

  std::size_t pixels_per_mask() const {
    return static_cast<std::size_t>(height) * width;
  }
  float class_score(int query, int cls) const {
    return class_scores[static_cast<std::size_t>(query) * num_classes + cls];
  }
  float mask_value(int query, std::size_t pixel) const {
    return masks[static_cast<std::size_t>(query) * pixels_per_mask() + pixel];
  }
};

struct DatasetStats {
  std::uint64_t num_sequences = 0;
  std::uint64_t num_frames = 0;
  double avg_sequence_length = 0.0;
  // One (width, height) entry per sequence, probed from the first frame's
  // ground-truth mask header; empty when probing was disabled.
  std::vector<std::pair<int, int>> resolutions;
};

void require_positive_dims(int width, int height, const char* what);

// Throws DimensionMismatch unless both grids have identical extents.
template <typename A, typename B>
void require_same_dims(const A& a, const B& b, const char* what_a,
                       const char* what_b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what_a) + " " + std::to_string(a.width) + "x" +
             std::to_string(a.height) + " vs " + what_b + " " +
             std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

}  // namespace roveval
