#include "roveval/component_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "roveval/errors.hpp"

namespace roveval {

namespace {

// Union-find with path halving; plain indices, no ranks (the relabeling pass
// normalizes ids anyway and run counts are small).
struct UnionFind {
  std::vector<std::int32_t> parent;

  std::int32_t add() {
    parent.push_back(static_cast<std::int32_t>(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct Run {
  int start = 0;  // inclusive column
  int end = 0;    // exclusive column
  std::int32_t id = 0;
};

double mean_fraction(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

void check_thresholds(const std::vector<double>& set, const char* what) {
  if (set.empty()) {
    fail(ErrorCode::SchemaViolation, std::string(what) + " set must be non-empty");
  }
  for (double t : set) {
    if (!(t > 0.0 && t < 1.0)) {
      fail(ErrorCode::SchemaViolation,
           std::string(what) + " thresholds must lie strictly inside (0,1)");
    }
  }
}

}  // namespace

BinaryMask binarize(const ScoreMap& scores, double theta) {
  BinaryMask mask = BinaryMask::filled(scores.width, scores.height, 0);
  const std::size_t pixels = scores.scores.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    mask.bits[i] = scores.scores[i] >= theta ? 1 : 0;
  }
  return mask;
}

BinaryMask binarize(const ScoreMap& scores, const LabelMask& labels, double theta) {
  require_same_dims(scores, labels, "score map", "label mask");
  BinaryMask mask = BinaryMask::filled(scores.width, scores.height, 0);
  const std::size_t pixels = scores.scores.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    mask.bits[i] =
        (labels.labels[i] != kVoid && scores.scores[i] >= theta) ? 1 : 0;
  }
  return mask;
}

BinaryMask obstacle_mask(const LabelMask& labels) {
  BinaryMask mask = BinaryMask::filled(labels.width, labels.height, 0);
  const std::size_t pixels = labels.labels.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    mask.bits[i] = labels.labels[i] == kObstacle ? 1 : 0;
  }
  return mask;
}

ComponentSet connected_components(const BinaryMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    fail(ErrorCode::SchemaViolation, "connectivity must be 4 or 8");
  }
  ComponentSet cs;
  cs.width = mask.width;
  cs.height = mask.height;
  cs.component_id.assign(mask.bits.size(), 0);

  // Two columns (start, end) may join runs one row apart; 8-connectivity
  // additionally joins diagonal touches.
  const int reach = connectivity == 8 ? 1 : 0;

  UnionFind uf;
  std::vector<Run> prev_runs;
  std::vector<Run> cur_runs;
  std::vector<Run> all_runs;
  std::vector<int> run_row;

  for (int y = 0; y < mask.height; ++y) {
    cur_runs.clear();
    const std::uint8_t* row = mask.bits.data() +
                              static_cast<std::size_t>(y) * mask.width;
    int x = 0;
    while (x < mask.width) {
      if (row[x] == 0) {
        ++x;
        continue;
      }
      Run r;
      r.start = x;
      while (x < mask.width && row[x] != 0) ++x;
      r.end = x;
      r.id = uf.add();
      cur_runs.push_back(r);
    }
    std::size_t pi = 0;
    for (const Run& r : cur_runs) {
      // Advance to the first previous-row run that can still touch r.
      while (pi < prev_runs.size() && prev_runs[pi].end + reach <= r.start) ++pi;
      for (std::size_t j = pi;
           j < prev_runs.size() && prev_runs[j].start < r.end + reach; ++j) {
        uf.unite(r.id, prev_runs[j].id);
      }
    }
    for (const Run& r : cur_runs) {
      all_runs.push_back(r);
      run_row.push_back(y);
    }
    std::swap(prev_runs, cur_runs);
  }

  // Runs are stored in raster order, so first-seen roots get ids matching
  // first-pixel raster order.
  std::vector<std::int32_t> root_to_id(uf.parent.size(), 0);
  for (std::size_t i = 0; i < all_runs.size(); ++i) {
    const std::int32_t root = uf.find(all_runs[i].id);
    if (root_to_id[root] == 0) {
      root_to_id[root] = ++cs.num_components;
      cs.sizes.push_back(0);
    }
    const std::int32_t id = root_to_id[root];
    std::int32_t* dst = cs.component_id.data() +
                        static_cast<std::size_t>(run_row[i]) * mask.width;
    for (int c = all_runs[i].start; c < all_runs[i].end; ++c) {
      dst[c] = id;
    }
    cs.sizes[id - 1] += all_runs[i].end - all_runs[i].start;
  }
  return cs;
}

std::vector<double> adjusted_siou(const ComponentSet& gt, const BinaryMask& gt_all,
                                  const BinaryMask& pred) {
  require_same_dims(gt, gt_all, "GT components", "GT mask");
  require_same_dims(gt, pred, "GT components", "prediction mask");
  if (gt.num_components == 0) {
    fail(ErrorCode::NoGroundTruthComponents,
         "adjusted sIoU needs at least one ground-truth component");
  }

  const ComponentSet pc = connected_components(pred, 8);
  const int ng = gt.num_components;
  const int np = pc.num_components;

  // inter[g*np + p] = |gt component g+1 ∩ pred component p+1|.
  std::vector<std::int64_t> inter(static_cast<std::size_t>(ng) * np, 0);
  std::vector<std::int64_t> pred_on_gt(np, 0);  // |p ∩ gt_all|
  const std::size_t pixels = gt.component_id.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::int32_t p = pc.component_id[i];
    if (p == 0) continue;
    if (gt_all.bits[i] != 0) pred_on_gt[p - 1] += 1;
    const std::int32_t g = gt.component_id[i];
    if (g != 0) inter[static_cast<std::size_t>(g - 1) * np + (p - 1)] += 1;
  }

  std::vector<double> out(ng, 0.0);
  for (int g = 0; g < ng; ++g) {
    std::int64_t intersection = 0;
    std::int64_t hull_size = 0;     // |K̂(g)|, union of touching pred comps
    std::int64_t hull_on_other = 0;  // |K̂(g) ∩ (gt_all \ g)|
    for (int p = 0; p < np; ++p) {
      const std::int64_t ov = inter[static_cast<std::size_t>(g) * np + p];
      if (ov == 0) continue;
      intersection += ov;
      hull_size += pc.sizes[p];
      hull_on_other += pred_on_gt[p] - ov;
    }
    if (intersection == 0) {
      out[g] = 0.0;
      continue;
    }
    const std::int64_t denom =
        gt.sizes[g] + hull_size - intersection - hull_on_other;
    out[g] = static_cast<double>(intersection) / static_cast<double>(denom);
  }
  return out;
}

std::vector<double> ppv(const ComponentSet& pred, const BinaryMask& gt_all) {
  require_same_dims(pred, gt_all, "prediction components", "GT mask");
  std::vector<std::int64_t> hits(pred.num_components, 0);
  const std::size_t pixels = pred.component_id.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::int32_t p = pred.component_id[i];
    if (p != 0 && gt_all.bits[i] != 0) hits[p - 1] += 1;
  }
  std::vector<double> out(pred.num_components, 0.0);
  for (int p = 0; p < pred.num_components; ++p) {
    out[p] = static_cast<double>(hits[p]) / static_cast<double>(pred.sizes[p]);
  }
  return out;
}

ComponentMetrics f1_star(const std::vector<double>& sious,
                         const std::vector<double>& ppvs,
                         const std::vector<double>& tau_set) {
  check_thresholds(tau_set, "tau");
  ComponentMetrics m;
  m.num_gt_components = static_cast<std::int64_t>(sious.size());
  m.num_pred_components = static_cast<std::int64_t>(ppvs.size());
  m.siou_mean = 100.0 * mean_fraction(sious);
  m.ppv_mean = 100.0 * mean_fraction(ppvs);
  m.thetas_without_predictions = ppvs.empty() ? 1 : 0;

  double f1_sum = 0.0;
  m.per_threshold.reserve(tau_set.size());
  for (double tau : tau_set) {
    ThresholdCounts tc;
    tc.tau = tau;
    for (double s : sious) {
      if (s > tau) tc.tp += 1;
    }
    tc.fn = static_cast<std::int64_t>(sious.size()) - tc.tp;
    for (double p : ppvs) {
      if (p <= tau) tc.fp += 1;
    }
    const std::int64_t denom = 2 * tc.tp + tc.fn + tc.fp;
    tc.f1 = denom == 0
                ? 0.0
                : 100.0 * 2.0 * static_cast<double>(tc.tp) /
                      static_cast<double>(denom);
    f1_sum += tc.f1;
    m.per_threshold.push_back(tc);
  }
  m.f1_star = f1_sum / static_cast<double>(tau_set.size());
  return m;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  grid.reserve(11);
  for (int i = 25; i <= 75; i += 5) {
    grid.push_back(i / 100.0);
  }
  return grid;
}

ComponentSweepConfig default_component_sweep() {
  ComponentSweepConfig cfg;
  cfg.theta_set = default_threshold_grid();
  cfg.tau_set = default_threshold_grid();
  return cfg;
}

ComponentPool::ComponentPool(const ComponentSweepConfig& cfg, double score_min,
                             double score_max)
    : cfg_(cfg) {
  check_thresholds(cfg.theta_set, "theta");
  check_thresholds(cfg.tau_set, "tau");
  if (!std::isfinite(score_min) || !std::isfinite(score_max) ||
      score_min > score_max) {
    fail(ErrorCode::BadBinEdges, "component pool needs a finite score range");
  }
  raw_thetas_.reserve(cfg.theta_set.size());
  for (double t : cfg.theta_set) {
    raw_thetas_.push_back(score_min + t * (score_max - score_min));
  }
  sious_.resize(cfg.theta_set.size());
  ppvs_.resize(cfg.theta_set.size());
}

void ComponentPool::add_frame(const ScoreMap& scores, const LabelMask& labels) {
  require_same_dims(scores, labels, "score map", "label mask");
  const BinaryMask gt_all = obstacle_mask(labels);
  const ComponentSet gtc = connected_components(gt_all, cfg_.connectivity);

  for (std::size_t t = 0; t < raw_thetas_.size(); ++t) {
    BinaryMask pred = binarize(scores, labels, raw_thetas_[t]);
    ComponentSet pc = connected_components(pred, cfg_.connectivity);
    if (cfg_.min_component_size > 0) {
      // Drop undersized predicted components, then relabel so downstream
      // code sees a consistent ComponentSet.
      bool any_dropped = false;
      for (std::int64_t sz : pc.sizes) {
        if (sz < cfg_.min_component_size) {
          any_dropped = true;
          break;
        }
      }
      if (any_dropped) {
        for (std::size_t i = 0; i < pred.bits.size(); ++i) {
          const std::int32_t id = pc.component_id[i];
          if (id != 0 && pc.sizes[id - 1] < cfg_.min_component_size) {
            pred.bits[i] = 0;
          }
        }
        pc = connected_components(pred, cfg_.connectivity);
      }
    }

    if (gtc.num_components > 0) {
      const std::vector<double> s = adjusted_siou(gtc, gt_all, pred);
      sious_[t].insert(sious_[t].end(), s.begin(), s.end());
    }
    const std::vector<double> p = ppv(pc, gt_all);
    ppvs_[t].insert(ppvs_[t].end(), p.begin(), p.end());
  }
}

void ComponentPool::merge(const ComponentPool& other) {
  if (raw_thetas_ != other.raw_thetas_ || cfg_.tau_set != other.cfg_.tau_set) {
    fail(ErrorCode::IncompatibleAccumulators,
         "component pools differ in threshold grids");
  }
  for (std::size_t t = 0; t < sious_.size(); ++t) {
    sious_[t].insert(sious_[t].end(), other.sious_[t].begin(),
                     other.sious_[t].end());
    ppvs_[t].insert(ppvs_[t].end(), other.ppvs_[t].begin(),
                    other.ppvs_[t].end());
  }
}

ComponentMetrics ComponentPool::finalize() const {
  if (sious_.empty() || sious_[0].empty()) {
    fail(ErrorCode::NoGroundTruthComponents,
         "component sweep saw no ground-truth components");
  }
  ComponentMetrics total;
  total.per_threshold.resize(cfg_.tau_set.size());
  for (std::size_t j = 0; j < cfg_.tau_set.size(); ++j) {
    total.per_threshold[j].tau = cfg_.tau_set[j];
  }

  double siou_sum = 0.0;
  double ppv_sum = 0.0;
  double f1_sum = 0.0;
  for (std::size_t t = 0; t < sious_.size(); ++t) {
    const ComponentMetrics at_theta = f1_star(sious_[t], ppvs_[t], cfg_.tau_set);
    siou_sum += at_theta.siou_mean;
    ppv_sum += at_theta.ppv_mean;
    f1_sum += at_theta.f1_star;
    total.thetas_without_predictions += at_theta.thetas_without_predictions;
    total.num_pred_components += at_theta.num_pred_components;
    for (std::size_t j = 0; j < cfg_.tau_set.size(); ++j) {
      total.per_threshold[j].tp += at_theta.per_threshold[j].tp;
      total.per_threshold[j].fn += at_theta.per_threshold[j].fn;
      total.per_threshold[j].fp += at_theta.per_threshold[j].fp;
      total.per_threshold[j].f1 += at_theta.per_threshold[j].f1;
    }
  }
  const double nt = static_cast<double>(sious_.size());
  // The GT pool is the same at every theta; the prediction pool is not, so
  // num_pred_components stays the sum over the theta grid.
  total.num_gt_components = static_cast<std::int64_t>(sious_[0].size());
  total.siou_mean = siou_sum / nt;
  total.ppv_mean = ppv_sum / nt;
  total.f1_star = f1_sum / nt;
  for (ThresholdCounts& tc : total.per_threshold) {
    tc.f1 /= nt;
  }
  return total;
}

ComponentMetrics sweep(const std::vector<ScoreMap>& scores,
                       const std::vector<LabelMask>& gts,
                       const ComponentSweepConfig& cfg) {
  if (scores.size() != gts.size() || scores.empty()) {
    fail(ErrorCode::DimensionMismatch,
         "sweep needs equally many score maps and label masks (>= 1)");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < scores.size(); ++f) {
    require_same_dims(scores[f], gts[f], "score map", "label mask");
    for (std::size_t i = 0; i < scores[f].scores.size(); ++i) {
      if (gts[f].labels[i] == kVoid) continue;
      const double s = scores[f].scores[i];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  if (!std::isfinite(lo)) {
    fail(ErrorCode::EmptyEvaluationDomain, "sweep saw no valid pixels");
  }

  ComponentPool pool(cfg, lo, hi);
  for (std::size_t f = 0; f < scores.size(); ++f) {
    pool.add_frame(scores[f], gts[f]);
  }
  return pool.finalize();
}

}  // namespace roveval
