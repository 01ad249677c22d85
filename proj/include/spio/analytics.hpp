#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spio/gateway.hpp"
#include "spio/types.hpp"

namespace spio {

// One task's execution history: the attempt that first succeeded, or none.
struct AttemptTrace {
  std::string task_id;
  std::optional<int> attempts_to_success;  // nullopt = never succeeded
  std::optional<StageId> stage;
  bool operator==(const AttemptTrace&) const = default;
};

// Fraction of traces not completed within K attempts. kEmptyTraces on an
// empty list.
double failure_rate_at_k(const std::vector<AttemptTrace>& traces, int k);

// One trace per stage run and per realized path, in first-occurrence order.
// Path traces have no stage and task ids "path<rank>".
std::vector<AttemptTrace> traces_from_run(const RunLedger& run);

inline constexpr std::array<int, 4> kReportedK = {1, 3, 5, 10};

// FR table: a row for all traces, one per stage present and one for final
// paths, each with its trace count.
std::string fr_tsv(const std::vector<AttemptTrace>& traces);

std::vector<UsageRow> token_breakdown(const RunLedger& run);
std::string tokens_tsv(const std::vector<UsageRow>& rows);
std::vector<UsageRow> parse_tokens_tsv(std::string_view text);  // kFormatError

}  // namespace spio
