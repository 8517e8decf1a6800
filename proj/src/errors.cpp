#include "roveval/errors.hpp"

namespace roveval {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::IllegalLabelValue: return "IllegalLabelValue";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NonMonotoneFrameIndex: return "NonMonotoneFrameIndex";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IncompatibleAccumulators: return "IncompatibleAccumulators";
    case ErrorCode::EmptyEvaluationDomain: return "EmptyEvaluationDomain";
    case ErrorCode::NoGroundTruthComponents: return "NoGroundTruthComponents";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::BadBinEdges: return "BadBinEdges";
    case ErrorCode::ObstacleOutOfBounds: return "ObstacleOutOfBounds";
  }
  return "UnknownError";
}

ToolkitError::ToolkitError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw ToolkitError(code, message);
}

}  // namespace roveval
