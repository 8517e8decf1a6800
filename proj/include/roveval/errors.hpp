#pragma once

#include <stdexcept>
#include <string>

namespace roveval {

enum class ErrorCode {
  MalformedFile,
  IllegalLabelValue,
  NonFiniteScore,
  DimensionMismatch,
  IoFailure,
  SchemaViolation,
  NonMonotoneFrameIndex,
  MissingFile,
  ShapeMismatch,
  NotADistribution,
  IndexOutOfRange,
  IncompatibleAccumulators,
  EmptyEvaluationDomain,
  NoGroundTruthComponents,
  SequenceTooShort,
  EmptyInstance,
  BadBinEdges,
  ObstacleOutOfBounds,
};

const char* error_code_name(ErrorCode code);

// Every failure in the toolkit is raised as a ToolkitError so callers (and
// the CLI) can distinguish validation problems (exit code 1) from I/O
// problems (exit code 2) without string matching.
class ToolkitError : public std::runtime_error {
public:
  ToolkitError(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }
  bool is_io_error() const {
    return code_ == ErrorCode::IoFailure || code_ == ErrorCode::MissingFile;
  }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace roveval
