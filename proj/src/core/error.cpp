#include "spio/error.hpp"

namespace spio {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kOutOfOrderStage: return "OutOfOrderStage";
    case ErrorCode::kDuplicateStage: return "DuplicateStage";
    case ErrorCode::kTooManyCandidates: return "TooManyCandidates";
    case ErrorCode::kStageArtifactMissing: return "StageArtifactMissing";
    case ErrorCode::kProviderUnreachable: return "ProviderUnreachable";
    case ErrorCode::kProviderRefusal: return "ProviderRefusal";
    case ErrorCode::kTokenBudgetExceeded: return "TokenBudgetExceeded";
    case ErrorCode::kFixtureExhausted: return "FixtureExhausted";
    case ErrorCode::kFixturePromptMismatch: return "FixturePromptMismatch";
    case ErrorCode::kMissingSlot: return "MissingSlot";
    case ErrorCode::kEmptyStagePlans: return "EmptyStagePlans";
    case ErrorCode::kNoCodeFound: return "NoCodeFound";
    case ErrorCode::kNoPlansFound: return "NoPlansFound";
    case ErrorCode::kMalformedJson: return "MalformedJson";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kStageFailed: return "StageFailed";
    case ErrorCode::kPlanningFailed: return "PlanningFailed";
    case ErrorCode::kUnparseableCode: return "UnparseableCode";
    case ErrorCode::kAmbiguousScore: return "AmbiguousScore";
    case ErrorCode::kUnmappablePlan: return "UnmappablePlan";
    case ErrorCode::kPredictionShapeMismatch: return "PredictionShapeMismatch";
    case ErrorCode::kLabelSetMismatch: return "LabelSetMismatch";
    case ErrorCode::kInstanceCountMismatch: return "InstanceCountMismatch";
    case ErrorCode::kMetricKindMismatch: return "MetricKindMismatch";
    case ErrorCode::kDegenerateTruth: return "DegenerateTruth";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kEmptyTraces: return "EmptyTraces";
    case ErrorCode::kDegenerateBatch: return "DegenerateBatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

}  // namespace spio
