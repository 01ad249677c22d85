#include "spio/cli.hpp"

namespace spio::cli {

ExitClass exit_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kFileNotFound:
    case ErrorCode::kMalformedCsv:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kTooFewRows:
      return ExitClass::kConfig;

    case ErrorCode::kStageFailed:
    case ErrorCode::kPlanningFailed:
    case ErrorCode::kPredictionShapeMismatch:
      return ExitClass::kStage;

    case ErrorCode::kNoCodeFound:
    case ErrorCode::kNoPlansFound:
    case ErrorCode::kMalformedJson:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kEmptySelection:
    case ErrorCode::kEmptyStagePlans:
    case ErrorCode::kUnmappablePlan:
    case ErrorCode::kUnparseableCode:
    case ErrorCode::kAmbiguousScore:
      return ExitClass::kSelection;

    case ErrorCode::kProviderUnreachable:
    case ErrorCode::kProviderRefusal:
    case ErrorCode::kTokenBudgetExceeded:
    case ErrorCode::kFixtureExhausted:
    case ErrorCode::kFixturePromptMismatch:
      return ExitClass::kProvider;

    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIoError:
    case ErrorCode::kFormatError:
    case ErrorCode::kOutOfOrderStage:
    case ErrorCode::kDuplicateStage:
    case ErrorCode::kTooManyCandidates:
    case ErrorCode::kStageArtifactMissing:
    case ErrorCode::kMissingSlot:
    case ErrorCode::kLabelSetMismatch:
    case ErrorCode::kInstanceCountMismatch:
    case ErrorCode::kMetricKindMismatch:
    case ErrorCode::kDegenerateTruth:
    case ErrorCode::kEmptyTraces:
    case ErrorCode::kDegenerateBatch:
    case ErrorCode::kDimensionMismatch:
      return ExitClass::kInternal;
  }
  return ExitClass::kInternal;
}

std::string_view exit_class_name(ExitClass c) {
  switch (c) {
    case ExitClass::kInternal: return "internal";
    case ExitClass::kConfig: return "config";
    case ExitClass::kStage: return "stage";
    case ExitClass::kSelection: return "selection";
    case ExitClass::kProvider: return "provider";
  }
  return "internal";
}

}  // namespace spio::cli
