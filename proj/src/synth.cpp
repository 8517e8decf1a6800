#include "roveval/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "roveval/errors.hpp"
#include "roveval/manifest.hpp"
#include "roveval/pgm.hpp"
#include "roveval/score_io.hpp"
#include "roveval/splitmix64.hpp"

namespace roveval {

namespace {

// Box-Muller with the usual pair caching; only sqrt/log/cos/sin of the
// generator's uniforms, no library distribution objects, so the stream is
// fully pinned down by the SplitMix64 sequence.
class GaussianDraws {
 public:
  explicit GaussianDraws(SplitMix64& rng) : rng_(rng) {}

  double next() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = rng_.next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = rng_.next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  SplitMix64& rng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

void check_config(const SynthConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1 || cfg.num_frames < 1 ||
      cfg.obstacle_size < 1) {
    fail(ErrorCode::SchemaViolation, "synth extents must be >= 1");
  }
  if (cfg.detection_probability < 0.0 || cfg.detection_probability > 1.0 ||
      cfg.false_positive_rate < 0.0 || cfg.false_positive_rate > 1.0 ||
      cfg.score_noise_sigma < 0.0) {
    fail(ErrorCode::SchemaViolation,
         "synth probabilities must lie in [0,1] and sigma must be >= 0");
  }
}

// Left edge of the obstacle at frame t; the obstacle starts one pixel in
// from the left border.
int obstacle_left(const SynthConfig& cfg, int t) {
  return 1 + static_cast<int>(std::floor(t * cfg.velocity));
}

// Paints the obstacle footprint at frame t into `hit` (true per pixel).
// Returns the painted pixel count.
std::int64_t paint_obstacle(const SynthConfig& cfg, int t,
                            std::vector<std::uint8_t>& hit) {
  const int left = obstacle_left(cfg, t);
  const int top = cfg.height / 2 - cfg.obstacle_size / 2;
  if (left < 0 || top < 0 || left + cfg.obstacle_size > cfg.width ||
      top + cfg.obstacle_size > cfg.height) {
    fail(ErrorCode::ObstacleOutOfBounds,
         "obstacle leaves the frame at time step " + std::to_string(t));
  }
  std::fill(hit.begin(), hit.end(), 0);
  std::int64_t painted = 0;
  if (cfg.shape == ObstacleShape::Rectangle) {
    for (int r = top; r < top + cfg.obstacle_size; ++r) {
      for (int c = left; c < left + cfg.obstacle_size; ++c) {
        hit[static_cast<std::size_t>(r) * cfg.width + c] = 1;
        ++painted;
      }
    }
  } else {
    const double radius = cfg.obstacle_size / 2.0;
    const double cx = left + radius;
    const double cy = top + radius;
    for (int r = top; r < top + cfg.obstacle_size; ++r) {
      for (int c = left; c < left + cfg.obstacle_size; ++c) {
        const double dx = c + 0.5 - cx;
        const double dy = r + 0.5 - cy;
        if (dx * dx + dy * dy <= radius * radius) {
          hit[static_cast<std::size_t>(r) * cfg.width + c] = 1;
          ++painted;
        }
      }
    }
  }
  if (painted == 0) {
    fail(ErrorCode::ObstacleOutOfBounds, "obstacle footprint is empty");
  }
  return painted;
}

}  // namespace

SynthSequence synth_sequence(const SynthConfig& cfg) {
  check_config(cfg);

  SynthSequence seq;
  seq.road = BinaryMask::filled(cfg.width, cfg.height, false);
  const int band_top = cfg.height / 3;
  const int band_bottom = (2 * cfg.height) / 3;
  for (int r = band_top; r < band_bottom; ++r) {
    for (int c = 0; c < cfg.width; ++c) {
      seq.road.set(c, r, true);
    }
  }

  SplitMix64 rng(cfg.seed);
  GaussianDraws gauss(rng);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(cfg.width) * cfg.height);

  for (int t = 0; t < cfg.num_frames; ++t) {
    paint_obstacle(cfg, t, hit);

    LabelMask gt = LabelMask::filled(cfg.width, cfg.height, kBackground);
    InstanceMap inst = InstanceMap::filled(cfg.width, cfg.height, 0);
    ScoreMap score = ScoreMap::filled(cfg.width, cfg.height, 0.0f);

    const bool detected = rng.next_bool(cfg.detection_probability);
    const double obstacle_level =
        detected ? kSynthDetectedScore : kSynthMissedScore;

    for (std::size_t i = 0; i < hit.size(); ++i) {
      if (hit[i] != 0) {
        gt.labels[i] = kObstacle;
        inst.ids[i] = 1;
        score.scores[i] = static_cast<float>(obstacle_level);
      } else if (cfg.false_positive_rate > 0.0 &&
                 rng.next_bool(cfg.false_positive_rate)) {
        score.scores[i] = static_cast<float>(kSynthFalsePositiveScore);
      }
    }
    if (cfg.score_noise_sigma > 0.0) {
      for (float& s : score.scores) {
        s = static_cast<float>(s + cfg.score_noise_sigma * gauss.next());
      }
    }

    seq.gts.push_back(std::move(gt));
    seq.instances.push_back(std::move(inst));
    seq.scores.push_back(std::move(score));
  }
  return seq;
}

std::vector<ScoreMap> random_baseline(int width, int height, int num_frames,
                                      std::uint64_t seed) {
  require_positive_dims(width, height, "random baseline");
  std::vector<ScoreMap> maps;
  maps.reserve(static_cast<std::size_t>(num_frames));
  for (int f = 0; f < num_frames; ++f) {
    SplitMix64 rng(seed ^ static_cast<std::uint64_t>(f));
    ScoreMap map = ScoreMap::filled(width, height, 0.0f);
    for (float& s : map.scores) {
      s = static_cast<float>(rng.next_double());
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

std::string write_synth_dataset(const std::vector<SynthConfig>& sequences,
                                const std::string& dataset_name,
                                const std::string& dir) {
  if (sequences.empty()) {
    fail(ErrorCode::SchemaViolation, "synth dataset needs at least one sequence");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorCode::IoFailure, "cannot create '" + dir + "': " + ec.message());
  }

  std::vector<SequenceManifest> manifests;
  char name[64];
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const SynthSequence seq = synth_sequence(sequences[s]);
    std::snprintf(name, sizeof(name), "seq_%03zu", s);
    const std::string seq_rel = name;
    const fs::path seq_dir = fs::path(dir) / seq_rel;
    fs::create_directories(seq_dir, ec);
    if (ec) {
      fail(ErrorCode::IoFailure,
           "cannot create '" + seq_dir.string() + "': " + ec.message());
    }

    SequenceManifest m;
    m.dataset_name = dataset_name;
    m.sequence_id = seq_rel;
    save_road_mask(seq.road, (seq_dir / "road.pgm").string());

    for (std::size_t t = 0; t < seq.gts.size(); ++t) {
      std::snprintf(name, sizeof(name), "gt_%06zu.pgm", t);
      const std::string gt_rel = seq_rel + "/" + name;
      save_label_mask(seq.gts[t], (fs::path(dir) / gt_rel).string());

      std::snprintf(name, sizeof(name), "score_%06zu.rvs", t);
      const std::string score_rel = seq_rel + "/" + name;
      save_score_map(seq.scores[t], (fs::path(dir) / score_rel).string());

      std::snprintf(name, sizeof(name), "inst_%06zu.pgm", t);
      const std::string inst_rel = seq_rel + "/" + name;
      save_instance_map(seq.instances[t], (fs::path(dir) / inst_rel).string());

      FrameEntry e;
      e.frame_index = static_cast<int>(t);
      e.gt_mask_path = gt_rel;
      e.score_map_path = score_rel;
      e.instance_map_path = inst_rel;
      e.road_mask_path = seq_rel + "/road.pgm";
      m.frames.push_back(std::move(e));
    }
    manifests.push_back(std::move(m));
  }

  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  save_manifest(manifests, dataset_name, manifest_path);
  return manifest_path;
}

}  // namespace roveval
