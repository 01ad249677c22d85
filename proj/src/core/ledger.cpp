#include "spio/ledger.hpp"

#include <algorithm>

#include "spio/error.hpp"

namespace spio {

PlanLedger record_artifact(const PlanLedger& ledger, StageArtifact artifact, RecordMode mode) {
  artifact.validate();
  const StageId stage = artifact.stage;
  for (StageId earlier : kAllStages) {
    if (!precedes(earlier, stage)) break;
    if (!ledger.artifacts.contains(earlier)) {
      fail(ErrorCode::kOutOfOrderStage, std::string(stage_name(stage)) + " recorded before " +
                                            std::string(stage_name(earlier)));
    }
  }
  for (const auto& [recorded, _] : ledger.artifacts) {
    if (precedes(stage, recorded)) {
      fail(ErrorCode::kOutOfOrderStage, std::string(stage_name(stage)) +
                                            " cannot change after " +
                                            std::string(stage_name(recorded)) + " was recorded");
    }
  }

  PlanLedger next = ledger;
  const auto existing = ledger.artifacts.find(stage);
  if (existing != ledger.artifacts.end()) {
    if (mode != RecordMode::kRepairReplace) {
      fail(ErrorCode::kDuplicateStage, std::string(stage_name(stage)) + " already recorded");
    }
    artifact.attempt_count += existing->second.attempt_count;
  }
  next.artifacts.insert_or_assign(stage, std::move(artifact));
  return next;
}

PlanLedger append_candidates(const PlanLedger& ledger, StageId stage,
                             std::vector<CandidatePlan> plans) {
  if (!ledger.artifacts.contains(stage)) {
    fail(ErrorCode::kStageArtifactMissing,
         "no artifact recorded for " + std::string(stage_name(stage)));
  }
  const auto existing = static_cast<int>(std::count_if(
      ledger.candidates.begin(), ledger.candidates.end(),
      [stage](const CandidatePlan& p) { return p.stage == stage; }));
  const int total = existing + static_cast<int>(plans.size());
  if (total > ledger.max_candidates_per_stage) {
    fail(ErrorCode::kTooManyCandidates,
         std::string(stage_name(stage)) + " would hold " + std::to_string(total) +
             " plans, limit is " + std::to_string(ledger.max_candidates_per_stage));
  }
  PlanLedger next = ledger;
  int ordinal = existing;
  for (auto& plan : plans) {
    if (plan.plan_text.empty()) fail(ErrorCode::kInvalidArgument, "plan_text must not be empty");
    plan.stage = stage;
    plan.ordinal = ++ordinal;
    next.candidates.push_back(std::move(plan));
  }
  return next;
}

std::vector<CandidatePlan> plans_before(const PlanLedger& ledger, StageId stage) {
  std::vector<CandidatePlan> out;
  std::copy_if(ledger.candidates.begin(), ledger.candidates.end(), std::back_inserter(out),
               [stage](const CandidatePlan& p) { return precedes(p.stage, stage); });
  return out;
}

}  // namespace spio
