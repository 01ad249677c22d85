#include <map>
#include <sstream>

#include "spio/analytics.hpp"
#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

double failure_rate_at_k(const std::vector<AttemptTrace>& traces, int k) {
  if (traces.empty()) fail(ErrorCode::kEmptyTraces, "no attempt traces");
  if (k < 1) fail(ErrorCode::kInvalidArgument, "K must be >= 1");
  std::size_t failed = 0;
  for (const auto& t : traces) {
    if (!t.attempts_to_success || *t.attempts_to_success > k) ++failed;
  }
  return static_cast<double>(failed) / static_cast<double>(traces.size());
}

std::vector<AttemptTrace> traces_from_run(const RunLedger& run) {
  std::vector<AttemptTrace> traces;
  // (stage, rank) -> index of the trace currently being extended
  std::map<std::pair<int, int>, std::size_t> open;
  std::map<std::string, int> seen;
  for (const auto& log : run.attempt_logs()) {
    const std::pair<int, int> key{stage_index(log.stage), log.path_rank.value_or(0)};
    auto it = open.find(key);
    if (log.attempt == 1 || it == open.end()) {
      std::string id = log.path_rank ? "path" + std::to_string(*log.path_rank) : std::string(stage_name(log.stage));
      if (const int n = ++seen[id]; n > 1) id += "#" + std::to_string(n);
      AttemptTrace trace{std::move(id), std::nullopt, std::nullopt};
      if (!log.path_rank) trace.stage = log.stage;
      traces.push_back(std::move(trace));
      it = open.insert_or_assign(key, traces.size() - 1).first;
    }
    auto& trace = traces[it->second];
    if (log.status == AttemptStatus::kOk && !trace.attempts_to_success) trace.attempts_to_success = log.attempt;
  }
  return traces;
}

std::string fr_tsv(const std::vector<AttemptTrace>& traces) {
  std::ostringstream out;
  out << "scope\ttraces";
  for (int k : kReportedK) out << "\tfr@" << k;
  out << "\n";
  auto row = [&](std::string_view scope, const std::vector<AttemptTrace>& subset) {
    if (subset.empty()) return;
    out << scope << "\t" << subset.size();
    for (int k : kReportedK) out << "\t" << format_fixed6(failure_rate_at_k(subset, k));
    out << "\n";
  };
  row("all", traces);
  for (StageId s : kAllStages) {
    std::vector<AttemptTrace> subset;
    for (const auto& t : traces) {
      if (t.stage == s) subset.push_back(t);
    }
    row(stage_name(s), subset);
  }
  std::vector<AttemptTrace> paths;
  for (const auto& t : traces) {
    if (!t.stage) paths.push_back(t);
  }
  row("final_paths", paths);
  return out.str();
}

}  // namespace spio
