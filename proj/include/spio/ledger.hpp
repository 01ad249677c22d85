#pragma once

#include <vector>

#include "spio/types.hpp"

namespace spio {

// Ledger operations are pure: each returns a new snapshot and leaves the
// input untouched.

enum class RecordMode { kAppend, kRepairReplace };

// Appends a stage artifact. Every earlier stage must already be recorded.
// kRepairReplace swaps out an existing artifact for the same stage (no later
// stage may exist yet); the stored attempt_count accumulates both runs.
PlanLedger record_artifact(const PlanLedger& ledger, StageArtifact artifact,
                           RecordMode mode = RecordMode::kAppend);

// Appends candidate plans for `stage`. Ordinals are assigned by position,
// continuing after any plans already present for that stage.
PlanLedger append_candidates(const PlanLedger& ledger, StageId stage,
                             std::vector<CandidatePlan> plans);

// Every candidate whose stage strictly precedes `stage`, in insertion order.
std::vector<CandidatePlan> plans_before(const PlanLedger& ledger, StageId stage);

}  // namespace spio
