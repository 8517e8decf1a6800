#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

enum class ObstacleShape { Rectangle, Disk };

// Score levels emitted by the synthetic detector. A missed detection still
// scores the obstacle above the background (0.0) but below the detected
// level, so ranking metrics barely move when detections drop out while
// mid-range binarization loses the obstacle entirely; that separation is
// what the flicker experiment measures. Injected false positives score at
// the detected level.
inline constexpr double kSynthDetectedScore = 1.0;
inline constexpr double kSynthMissedScore = 0.4;
inline constexpr double kSynthFalsePositiveScore = 1.0;

struct SynthConfig {
  int width = 64;
  int height = 64;
  int num_frames = 16;
  ObstacleShape shape = ObstacleShape::Rectangle;
  int obstacle_size = 8;        // side length / disk diameter in pixels
  double velocity = 1.0;        // pixels per frame, rightward
  double detection_probability = 1.0;
  double score_noise_sigma = 0.0;
  double false_positive_rate = 0.0;  // per background pixel per frame
  std::uint64_t seed = 0;
};

struct SynthSequence {
  std::vector<LabelMask> gts;
  std::vector<ScoreMap> scores;
  std::vector<InstanceMap> instances;
  BinaryMask road;  // static horizontal band, shared by all frames
};

// Moving obstacle on a road band. GT and instance maps follow the trajectory
// every frame; scores depend on a per-frame Bernoulli(p) detection draw.
// All randomness comes from SplitMix64(cfg.seed) with a fixed draw order:
// per frame one detection draw, then per background pixel in raster order a
// false-positive draw (when the rate is positive), then per pixel a noise
// draw (when sigma is positive). Throws ObstacleOutOfBounds when the
// trajectory leaves the frame.
SynthSequence synth_sequence(const SynthConfig& cfg);

// Uniform [0,1) score maps; frame f uses SplitMix64(seed ^ f), so any single
// frame can be regenerated without the rest.
std::vector<ScoreMap> random_baseline(int width, int height, int num_frames,
                                      std::uint64_t seed);

// Writes one directory per sequence (GT/score/instance files plus the shared
// road mask) and a manifest.json binding them with relative paths. Returns
// the manifest path.
std::string write_synth_dataset(const std::vector<SynthConfig>& sequences,
                                const std::string& dataset_name,
                                const std::string& dir);

}  // namespace roveval
