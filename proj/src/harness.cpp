#include "roveval/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "roveval/pgm.hpp"
#include "roveval/pixel_metrics.hpp"
#include "roveval/score_io.hpp"
#include "roveval/splitmix64.hpp"

namespace roveval {

namespace {

// Runs fn(0..count-1) on `workers` threads pulling indices from a shared
// counter. If any call throws, the exception from the lowest index is
// rethrown after all threads finish, keeping failures deterministic.
void parallel_for_index(int workers, int count,
                        const std::function<void(int)>& fn) {
  if (count == 0) return;
  const int n_threads = std::max(1, std::min(workers, count));
  if (n_threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    threads.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t sequence_seed(const EvalConfig& cfg, const SequenceManifest& m) {
  return cfg.seed ^ fnv1a64(m.dataset_name + "/" + m.sequence_id);
}

// Score source for one frame. `seq_seed` feeds the "random" method so each
// sequence gets its own documented stream.
ScoreMap frame_scores(const FrameEntry& e, const EvalConfig& cfg,
                      std::uint64_t seq_seed, const LabelMask& gt) {
  if (cfg.method == "precomputed") {
    if (e.score_map_path.empty()) {
      fail(ErrorCode::MissingFile,
           "frame " + std::to_string(e.frame_index) +
               " has no score map but the method is 'precomputed'");
    }
    ScoreMap map = load_score_map(e.score_map_path);
    require_same_dims(map, gt, "score map", "label mask");
    return map;
  }
  if (cfg.method == "random") {
    SplitMix64 rng(seq_seed ^ static_cast<std::uint64_t>(e.frame_index));
    ScoreMap map = ScoreMap::filled(gt.width, gt.height, 0.0f);
    for (float& s : map.scores) s = static_cast<float>(rng.next_double());
    return map;
  }
  if (e.model_output_path.empty()) {
    fail(ErrorCode::MissingFile,
         "frame " + std::to_string(e.frame_index) +
             " has no model output but the method is '" + cfg.method + "'");
  }
  const MaskTransformerOutput out = load_model_output(e.model_output_path);
  ScoreMap map = compute_score(out, parse_scoring_method(cfg.method), cfg.scoring);
  require_same_dims(map, gt, "computed score map", "label mask");
  return map;
}

BinaryMask valid_mask(const LabelMask& labels) {
  BinaryMask mask = BinaryMask::filled(labels.width, labels.height, false);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    mask.bits[i] = labels.labels[i] != kVoid ? 1 : 0;
  }
  return mask;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct DatasetGroup {
  std::string name;
  std::vector<const SequenceManifest*> sequences;
};

std::vector<DatasetGroup> group_by_dataset(
    const std::vector<SequenceManifest>& manifests) {
  std::vector<DatasetGroup> groups;
  for (const SequenceManifest& m : manifests) {
    DatasetGroup* g = nullptr;
    for (DatasetGroup& existing : groups) {
      if (existing.name == m.dataset_name) {
        g = &existing;
        break;
      }
    }
    if (g == nullptr) {
      groups.push_back(DatasetGroup{m.dataset_name, {}});
      g = &groups.back();
    }
    g->sequences.push_back(&m);
  }
  return groups;
}

struct SequenceRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

// Stage 2 output for one sequence.
struct SequenceStats {
  PixelAccumulator pixels;
  std::optional<ComponentPool> components;
};

MetricReport evaluate_dataset(const DatasetGroup& group, const EvalConfig& cfg) {
  const int n_sequences = static_cast<int>(group.sequences.size());
  const bool need_accumulator =
      cfg.run_pixel ||
      (cfg.run_video && cfg.video_theta_mode == VideoThetaMode::Tpr95);

  // Stage 1: score range. Skipped when supplied explicitly.
  double lo = 0.0;
  double hi = 0.0;
  if (cfg.score_range) {
    lo = cfg.score_range->first;
    hi = cfg.score_range->second;
    if (!(lo < hi)) {
      fail(ErrorCode::BadBinEdges, "score range must satisfy min < max");
    }
  } else {
    std::vector<SequenceRange> ranges(static_cast<std::size_t>(n_sequences));
    parallel_for_index(cfg.workers, n_sequences, [&](int s) {
      const SequenceManifest& m = *group.sequences[static_cast<std::size_t>(s)];
      const std::uint64_t seed = sequence_seed(cfg, m);
      SequenceRange r;
      for (const FrameEntry& e : m.frames) {
        const LabelMask gt = load_label_mask(e.gt_mask_path);
        const ScoreMap scores = frame_scores(e, cfg, seed, gt);
        for (std::size_t i = 0; i < scores.scores.size(); ++i) {
          if (gt.labels[i] == kVoid) continue;
          const double v = scores.scores[i];
          r.lo = std::min(r.lo, v);
          r.hi = std::max(r.hi, v);
        }
      }
      ranges[static_cast<std::size_t>(s)] = r;
    });
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const SequenceRange& r : ranges) {
      lo = std::min(lo, r.lo);
      hi = std::max(hi, r.hi);
    }
    if (!std::isfinite(lo)) {
      fail(ErrorCode::EmptyEvaluationDomain,
           "dataset '" + group.name + "' has no valid pixels");
    }
    if (lo == hi) {
      // Constant scores: widen so binning stays defined; every pixel lands
      // in the bottom bin, which ranks all scores equal.
      hi = lo + 1.0;
    }
  }

  // Stage 2: pixel accumulation and component sweep.
  std::vector<SequenceStats> stats(static_cast<std::size_t>(n_sequences));
  parallel_for_index(cfg.workers, n_sequences, [&](int s) {
    const SequenceManifest& m = *group.sequences[static_cast<std::size_t>(s)];
    const std::uint64_t seed = sequence_seed(cfg, m);
    SequenceStats out;
    if (need_accumulator) {
      out.pixels = PixelAccumulator(cfg.bins, lo, hi);
    }
    if (cfg.run_component) {
      out.components.emplace(cfg.sweep, lo, hi);
    }
    for (const FrameEntry& e : m.frames) {
      const LabelMask gt = load_label_mask(e.gt_mask_path);
      const ScoreMap scores = frame_scores(e, cfg, seed, gt);
      if (need_accumulator) {
        accumulate(out.pixels, scores, gt);
      }
      if (out.components) {
        out.components->add_frame(scores, gt);
      }
    }
    stats[static_cast<std::size_t>(s)] = std::move(out);
  });

  MetricReport report;
  report.dataset = group.name;
  report.method = cfg.method;
  report.config_fingerprint = config_fingerprint(canonical_config_string(cfg));

  PixelAccumulator total;
  if (need_accumulator) {
    total = PixelAccumulator(cfg.bins, lo, hi);
    for (const SequenceStats& s : stats) {
      total = merge(total, s.pixels);
    }
  }
  if (cfg.run_pixel) {
    report.pixel = finalize(total);
  }
  if (cfg.run_component) {
    ComponentPool pool(cfg.sweep, lo, hi);
    for (const SequenceStats& s : stats) {
      pool.merge(*s.components);
    }
    report.component = pool.finalize();
  }

  // Stage 3: video consistency at the resolved threshold.
  if (cfg.run_video) {
    double theta_raw = 0.0;
    if (cfg.video_theta_mode == VideoThetaMode::Tpr95) {
      theta_raw = tpr95_threshold(total);
    } else {
      theta_raw = lo + cfg.video_theta * (hi - lo);
    }

    std::vector<std::optional<VideoConsistencyResult>> per_sequence(
        static_cast<std::size_t>(n_sequences));
    parallel_for_index(cfg.workers, n_sequences, [&](int s) {
      const SequenceManifest& m = *group.sequences[static_cast<std::size_t>(s)];
      if (static_cast<int>(m.frames.size()) < cfg.video.window) {
        per_sequence[static_cast<std::size_t>(s)] = std::nullopt;
        return;
      }
      const std::uint64_t seed = sequence_seed(cfg, m);
      VcStream stream(cfg.video);
      for (const FrameEntry& e : m.frames) {
        const LabelMask gt = load_label_mask(e.gt_mask_path);
        const ScoreMap scores = frame_scores(e, cfg, seed, gt);
        stream.add_frame(binarize(scores, gt, theta_raw), obstacle_mask(gt),
                         valid_mask(gt));
      }
      per_sequence[static_cast<std::size_t>(s)] = stream.finalize();
    });
    report.video = aggregate_sequences(per_sequence, cfg.video);
  }

  // Conventions that shaped the numbers, in fixed order.
  if (cfg.run_pixel) {
    report.notes.push_back("pixel metrics pool all valid pixels dataset-wide");
  }
  if (cfg.run_component) {
    report.notes.push_back(
        "component thresholds applied to dataset min-max normalized scores; "
        "F1* averages the F1 grid over theta and tau");
  }
  if (need_accumulator) {
    const std::int64_t clipped = total.clipped_low_pos + total.clipped_low_neg +
                                 total.clipped_high_pos + total.clipped_high_neg;
    if (clipped > 0) {
      report.notes.push_back(std::to_string(clipped) +
                             " pixels fell outside the configured score range");
    }
  }
  if (report.video) {
    report.notes.push_back("video consistency averaged unweighted over sequences");
    if (report.video->sequences_skipped_short > 0) {
      report.notes.push_back(
          std::to_string(report.video->sequences_skipped_short) +
          " sequence(s) shorter than the window were skipped");
    }
    if (report.video->vc_star_collapsed) {
      report.notes.push_back(
          "vc_star forced to 0 where a variant had no evaluable window");
    }
  }
  return report;
}

}  // namespace

std::string canonical_config_string(const EvalConfig& cfg) {
  std::ostringstream out;
  out << "families=";
  if (cfg.run_pixel) out << "p";
  if (cfg.run_component) out << "c";
  if (cfg.run_video) out << "v";
  out << ";method=" << cfg.method;
  out << ";softmax_c=" << (cfg.scoring.apply_softmax_to_C ? 1 : 0);
  out << ";logistic_m=" << (cfg.scoring.apply_logistic_to_M ? 1 : 0);
  out << ";drop_no_object=" << (cfg.scoring.drop_no_object_column ? 1 : 0);
  out << ";void_index="
      << (cfg.scoring.void_index ? std::to_string(*cfg.scoring.void_index)
                                 : std::string("none"));
  out << ";bins=" << cfg.bins;
  out << ";range=";
  if (cfg.score_range) {
    out << format_double(cfg.score_range->first) << ":"
        << format_double(cfg.score_range->second);
  } else {
    out << "auto";
  }
  out << ";theta_set=";
  for (std::size_t i = 0; i < cfg.sweep.theta_set.size(); ++i) {
    if (i) out << ",";
    out << format_double(cfg.sweep.theta_set[i]);
  }
  out << ";tau_set=";
  for (std::size_t i = 0; i < cfg.sweep.tau_set.size(); ++i) {
    if (i) out << ",";
    out << format_double(cfg.sweep.tau_set[i]);
  }
  out << ";connectivity=" << cfg.sweep.connectivity;
  out << ";min_component_size=" << cfg.sweep.min_component_size;
  out << ";window=" << cfg.video.window;
  out << ";stride=" << cfg.video.stride;
  out << ";video_theta=";
  if (cfg.video_theta_mode == VideoThetaMode::Tpr95) {
    out << "tpr95";
  } else {
    out << format_double(cfg.video_theta);
  }
  out << ";seed=" << cfg.seed;
  return out.str();
}

std::vector<MetricReport> run_evaluation(
    const std::vector<SequenceManifest>& manifests, const EvalConfig& cfg) {
  if (manifests.empty()) {
    fail(ErrorCode::EmptyEvaluationDomain, "no sequences to evaluate");
  }
  if (cfg.workers < 1) {
    fail(ErrorCode::SchemaViolation, "worker count must be >= 1");
  }
  if (cfg.method != "precomputed" && cfg.method != "random") {
    parse_scoring_method(cfg.method);  // reject unknown names before any I/O
  }
  std::vector<MetricReport> reports;
  for (const DatasetGroup& group : group_by_dataset(manifests)) {
    reports.push_back(evaluate_dataset(group, cfg));
  }
  return reports;
}

}  // namespace roveval
