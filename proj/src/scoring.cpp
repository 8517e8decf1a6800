#include "roveval/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace roveval {

namespace {

void check_model_shape(const MaskTransformerOutput& out) {
  if (out.num_queries < 1 || out.num_classes < 1 || out.width < 1 ||
      out.height < 1) {
    fail(ErrorCode::ShapeMismatch, "model output has empty extent");
  }
  const std::size_t n = static_cast<std::size_t>(out.num_queries);
  const std::size_t k = static_cast<std::size_t>(out.num_classes);
  const std::size_t hw = static_cast<std::size_t>(out.width) * out.height;
  if (out.class_scores.size() != n * k) {
    fail(ErrorCode::ShapeMismatch, "class score matrix does not match N x K");
  }
  if (out.masks.size() != n * hw) {
    fail(ErrorCode::ShapeMismatch, "mask matrix does not match N x H x W");
  }
}

// Activated copy of C as row-major N x K_kept doubles. Softmax runs over the
// full input row; the dropped column's mass is then renormalized away.
std::vector<double> activated_class_rows(const MaskTransformerOutput& out,
                                         const ScoringConfig& cfg,
                                         int* kept_classes) {
  const int n = out.num_queries;
  const int k_in = out.num_classes;
  int k_out = k_in;
  if (cfg.drop_no_object_column) {
    if (k_in < 2) {
      fail(ErrorCode::ShapeMismatch,
           "cannot drop the no-object column of a single-class output");
    }
    k_out = k_in - 1;
  }
  *kept_classes = k_out;

  std::vector<double> rows(static_cast<std::size_t>(n) * k_out);
  std::vector<double> row(k_in);
  for (int q = 0; q < n; ++q) {
    for (int k = 0; k < k_in; ++k) {
      row[k] = out.class_score(q, k);
    }
    if (cfg.apply_softmax_to_C) {
      const double m = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (double& v : row) {
        v = std::exp(v - m);
        sum += v;
      }
      for (double& v : row) v /= sum;
    }
    double kept_sum = 0.0;
    for (int k = 0; k < k_out; ++k) kept_sum += row[k];
    const bool renormalize =
        cfg.drop_no_object_column && cfg.apply_softmax_to_C && kept_sum > 0.0;
    for (int k = 0; k < k_out; ++k) {
      double v = row[k];
      if (renormalize) v /= kept_sum;
      rows[static_cast<std::size_t>(q) * k_out + k] = v;
    }
  }
  return rows;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

ScoreMap map_like(const DenseClassScores& d) {
  ScoreMap map;
  map.width = d.width;
  map.height = d.height;
  map.scores.resize(static_cast<std::size_t>(d.width) * d.height);
  return map;
}

// Applies a scalar kernel to every pixel's class vector.
template <typename Kernel>
ScoreMap per_pixel(const DenseClassScores& d, Kernel kernel) {
  ScoreMap map = map_like(d);
  const int k = d.num_classes;
  std::vector<double> buf(k);
  const std::size_t pixels = map.scores.size();
  for (std::size_t x = 0; x < pixels; ++x) {
    const float* src = d.values.data() + x * k;
    for (int i = 0; i < k; ++i) buf[i] = src[i];
    map.scores[x] = static_cast<float>(kernel(std::span<const double>(buf)));
  }
  return map;
}

}  // namespace

std::string scoring_method_name(ScoringMethod method) {
  switch (method) {
    case ScoringMethod::Msp: return "msp";
    case ScoringMethod::Entropy: return "entropy";
    case ScoringMethod::Energy: return "energy";
    case ScoringMethod::MaxLogit: return "maxlogit";
    case ScoringMethod::Void: return "void";
    case ScoringMethod::Rba: return "rba";
    case ScoringMethod::Eam: return "eam";
    case ScoringMethod::S2: return "s2";
  }
  fail(ErrorCode::SchemaViolation, "unknown scoring method enum value");
}

ScoringMethod parse_scoring_method(const std::string& name) {
  if (name == "msp") return ScoringMethod::Msp;
  if (name == "entropy") return ScoringMethod::Entropy;
  if (name == "energy") return ScoringMethod::Energy;
  if (name == "maxlogit") return ScoringMethod::MaxLogit;
  if (name == "void") return ScoringMethod::Void;
  if (name == "rba") return ScoringMethod::Rba;
  if (name == "eam") return ScoringMethod::Eam;
  if (name == "s2") return ScoringMethod::S2;
  fail(ErrorCode::SchemaViolation, "unknown scoring method '" + name + "'");
}

double kernel_msp(std::span<const double> probs) {
  double m = probs[0];
  for (double v : probs) m = std::max(m, v);
  return 1.0 - m;
}

double kernel_entropy(std::span<const double> probs) {
  double sum = 0.0;
  for (double v : probs) {
    if (v < 0.0) {
      fail(ErrorCode::NotADistribution, "negative probability in entropy input");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-4) {
    fail(ErrorCode::NotADistribution,
         "entropy input sums to " + std::to_string(sum) + ", expected 1");
  }
  double h = 0.0;
  for (double v : probs) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double kernel_energy(std::span<const double> logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - m);
  return -(m + std::log(sum));
}

double kernel_maxlogit(std::span<const double> logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  return -m;
}

double kernel_rba(std::span<const double> logits) {
  double sum = 0.0;
  for (double v : logits) sum += std::tanh(v);
  return -sum;
}

DenseClassScores fuse(const MaskTransformerOutput& out, const ScoringConfig& cfg) {
  check_model_shape(out);
  int k_out = 0;
  const std::vector<double> c = activated_class_rows(out, cfg, &k_out);

  DenseClassScores d;
  d.num_classes = k_out;
  d.width = out.width;
  d.height = out.height;
  const std::size_t hw = static_cast<std::size_t>(out.width) * out.height;
  std::vector<double> acc(hw * k_out, 0.0);

  for (int q = 0; q < out.num_queries; ++q) {
    const double* crow = c.data() + static_cast<std::size_t>(q) * k_out;
    const float* mrow = out.masks.data() + static_cast<std::size_t>(q) * hw;
    for (std::size_t x = 0; x < hw; ++x) {
      double mv = mrow[x];
      if (cfg.apply_logistic_to_M) mv = logistic(mv);
      double* dst = acc.data() + x * k_out;
      for (int k = 0; k < k_out; ++k) {
        dst[k] += crow[k] * mv;
      }
    }
  }

  d.values.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    d.values[i] = static_cast<float>(acc[i]);
  }
  return d;
}

ScoreMap score_msp(const DenseClassScores& d) {
  return per_pixel(d, [](std::span<const double> v) { return kernel_msp(v); });
}

ScoreMap score_entropy(const DenseClassScores& d) {
  return per_pixel(d, [](std::span<const double> v) { return kernel_entropy(v); });
}

ScoreMap score_energy(const DenseClassScores& d) {
  return per_pixel(d, [](std::span<const double> v) { return kernel_energy(v); });
}

ScoreMap score_maxlogit(const DenseClassScores& d) {
  return per_pixel(d, [](std::span<const double> v) { return kernel_maxlogit(v); });
}

ScoreMap score_void(const DenseClassScores& d, int v) {
  if (v < 0 || v >= d.num_classes) {
    fail(ErrorCode::IndexOutOfRange,
         "void class index " + std::to_string(v) + " outside K=" +
             std::to_string(d.num_classes));
  }
  ScoreMap map = map_like(d);
  const std::size_t pixels = map.scores.size();
  for (std::size_t x = 0; x < pixels; ++x) {
    map.scores[x] = d.values[x * d.num_classes + v];
  }
  return map;
}

ScoreMap score_rba(const DenseClassScores& d) {
  return per_pixel(d, [](std::span<const double> v) { return kernel_rba(v); });
}

ScoreMap score_s2(const DenseClassScores& d) { return score_maxlogit(d); }

ScoreMap score_eam(const MaskTransformerOutput& out, const ScoringConfig& cfg) {
  check_model_shape(out);
  int k_out = 0;
  const std::vector<double> c = activated_class_rows(out, cfg, &k_out);

  // Per-query row maxima of C; the per-pixel work then only needs the winner.
  std::vector<double> row_max(out.num_queries);
  for (int q = 0; q < out.num_queries; ++q) {
    const double* crow = c.data() + static_cast<std::size_t>(q) * k_out;
    row_max[q] = *std::max_element(crow, crow + k_out);
  }

  ScoreMap map;
  map.width = out.width;
  map.height = out.height;
  const std::size_t hw = static_cast<std::size_t>(out.width) * out.height;
  map.scores.resize(hw);
  // The logistic is monotone, so the winning query is found on raw M values
  // regardless of cfg.apply_logistic_to_M.
  for (std::size_t x = 0; x < hw; ++x) {
    int winner = 0;
    double best = out.masks[x];
    for (int q = 1; q < out.num_queries; ++q) {
      const double mv = out.masks[static_cast<std::size_t>(q) * hw + x];
      if (mv > best) {
        best = mv;
        winner = q;
      }
    }
    map.scores[x] = static_cast<float>(-row_max[winner]);
  }
  return map;
}

ScoreMap compute_score(const MaskTransformerOutput& out, ScoringMethod method,
                       const ScoringConfig& cfg) {
  if (method == ScoringMethod::Eam) {
    return score_eam(out, cfg);
  }
  const DenseClassScores d = fuse(out, cfg);
  switch (method) {
    case ScoringMethod::Msp: return score_msp(d);
    case ScoringMethod::Entropy: return score_entropy(d);
    case ScoringMethod::Energy: return score_energy(d);
    case ScoringMethod::MaxLogit: return score_maxlogit(d);
    case ScoringMethod::Void:
      if (!cfg.void_index) {
        fail(ErrorCode::IndexOutOfRange, "void scoring requires a class index");
      }
      return score_void(d, *cfg.void_index);
    case ScoringMethod::Rba: return score_rba(d);
    case ScoringMethod::S2: return score_s2(d);
    case ScoringMethod::Eam: break;
  }
  fail(ErrorCode::SchemaViolation, "unknown scoring method enum value");
}

}  // namespace roveval
