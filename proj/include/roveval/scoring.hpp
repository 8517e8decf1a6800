#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roveval/errors.hpp"
#include "roveval/types.hpp"

namespace roveval {

// Per-pixel class evidence, pixel-major: values[x*K + k]. Produced by fuse()
// or loaded from an external dense prediction.
struct DenseClassScores {
  int num_classes = 0;
  int width = 0;
  int height = 0;
  std::vector<float> values;

  int num_pixels() const { return width * height; }
  float at(int pixel, int k) const {
    return values[static_cast<std::size_t>(pixel) * num_classes + k];
  }
};

// Activation policy for mask-transformer outputs. Nothing is inferred from
// the data: if the producer already applied softmax/sigmoid, leave the flags
// off. When drop_no_object_column is set the last class column is removed
// before fusion; rows are renormalized only when softmax produced them,
// since raw logits have no sum-to-one property to restore.
struct ScoringConfig {
  bool apply_softmax_to_C = false;
  bool apply_logistic_to_M = false;
  bool drop_no_object_column = false;
  std::optional<int> void_index;
};

enum class ScoringMethod {
  Msp,
  Entropy,
  Energy,
  MaxLogit,
  Void,
  Rba,
  Eam,
  S2,
};

// Name <-> enum mapping used by the CLI and reports ("msp", "entropy", ...).
std::string scoring_method_name(ScoringMethod method);
ScoringMethod parse_scoring_method(const std::string& name);

// Scalar kernels at double precision. The ScoreMap wrappers below call these
// per pixel and narrow to float at the end.
double kernel_msp(std::span<const double> probs);
// Requires a probability vector (non-negative, sum 1 within 1e-4); throws
// NotADistribution otherwise. 0*log(0) is taken as 0; natural log.
double kernel_entropy(std::span<const double> probs);
// -logsumexp with max shift; safe for logits of any finite magnitude.
double kernel_energy(std::span<const double> logits);
double kernel_maxlogit(std::span<const double> logits);
double kernel_rba(std::span<const double> logits);

// d[k,x] = sum_n C[n,k] * M[n,x], after the configured activations.
DenseClassScores fuse(const MaskTransformerOutput& out, const ScoringConfig& cfg);

ScoreMap score_msp(const DenseClassScores& d);
ScoreMap score_entropy(const DenseClassScores& d);
ScoreMap score_energy(const DenseClassScores& d);
ScoreMap score_maxlogit(const DenseClassScores& d);
// Projects class column v; throws IndexOutOfRange when v >= K.
ScoreMap score_void(const DenseClassScores& d, int v);
ScoreMap score_rba(const DenseClassScores& d);
// Alias of score_maxlogit for dense external logits; kept as its own entry
// point so reports can name the method distinctly.
ScoreMap score_s2(const DenseClassScores& d);

// Winner-query rule: n*(x) = argmax_n M[n,x] (lowest index wins ties),
// score(x) = -max_k C[n*(x),k]. Activations from cfg apply first.
ScoreMap score_eam(const MaskTransformerOutput& out, const ScoringConfig& cfg);

// Dispatch on method. Every method except eam goes through fuse(); void
// additionally requires cfg.void_index.
ScoreMap compute_score(const MaskTransformerOutput& out, ScoringMethod method,
                       const ScoringConfig& cfg);

}  // namespace roveval
