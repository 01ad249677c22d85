#pragma once

#include <string_view>
#include <vector>

#include "spio/cascade.hpp"
#include "spio/gateway.hpp"
#include "spio/types.hpp"

namespace spio {

inline constexpr double kMatchThreshold = 0.6;

// Dice coefficient of the two texts' lowercase word-token sets.
double token_overlap(std::string_view a, std::string_view b);

// Maps a plan as echoed by the model back to a candidate of `stage`.
// A leading "Plan N:" / "Method N:" label is stripped. Then: whitespace- and
// case-normalized containment (unique), else the unique best token overlap of
// at least kMatchThreshold, else the label's ordinal if it names a candidate.
// kUnmappablePlan otherwise.
PlanRef map_plan_text(const PlanLedger& ledger, StageId stage, std::string_view text);

// Asks the model for one plan per stage and maps the reply to a rank-1 path.
PipelinePath select_single(const PlanLedger& ledger, RunLedger& run, Gateway& gateway,
                           const CascadeInputs& inputs);

// Asks for the top k paths; ranks follow the reply's entry order.
std::vector<PipelinePath> select_topk(const PlanLedger& ledger, RunLedger& run, Gateway& gateway,
                                      const CascadeInputs& inputs, int k);

}  // namespace spio
