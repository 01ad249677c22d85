#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spio {

// Every failure the engine can surface. The CLI maps each value to exactly
// one process exit code (see cli/exit_codes.cpp).
enum class ErrorCode {
  // configuration / input data
  kInvalidArgument,
  kConfigError,
  kFileNotFound,
  kMalformedCsv,
  kEmptyDataset,
  kIoError,
  kFormatError,
  // ledger
  kOutOfOrderStage,
  kDuplicateStage,
  kTooManyCandidates,
  kStageArtifactMissing,
  // llm gateway
  kProviderUnreachable,
  kProviderRefusal,
  kTokenBudgetExceeded,
  kFixtureExhausted,
  kFixturePromptMismatch,
  // prompts and parsing
  kMissingSlot,
  kEmptyStagePlans,
  kNoCodeFound,
  kNoPlansFound,
  kMalformedJson,
  kSchemaViolation,
  kEmptySelection,
  // cascade
  kStageFailed,
  kPlanningFailed,
  kUnparseableCode,
  kAmbiguousScore,
  // path optimization
  kUnmappablePlan,
  kPredictionShapeMismatch,
  kLabelSetMismatch,
  kInstanceCountMismatch,
  kMetricKindMismatch,
  kDegenerateTruth,
  kTooFewRows,
  // analytics
  kEmptyTraces,
  kDegenerateBatch,
  kDimensionMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace spio
