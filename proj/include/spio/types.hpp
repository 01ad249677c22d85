#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spio {

// Pipeline stages in their fixed execution order.
enum class StageId {
  kPreprocess = 0,
  kFeatureEngineering = 1,
  kModelSelection = 2,
  kHyperparameterTuning = 3,
};

inline constexpr std::array<StageId, 4> kAllStages = {
    StageId::kPreprocess, StageId::kFeatureEngineering,
    StageId::kModelSelection, StageId::kHyperparameterTuning};

constexpr int stage_index(StageId s) { return static_cast<int>(s); }
constexpr bool precedes(StageId a, StageId b) {
  return stage_index(a) < stage_index(b);
}
// Model selection and tuning report a validation score; the first two stages
// report a data summary.
constexpr bool stage_has_score(StageId s) {
  return s == StageId::kModelSelection || s == StageId::kHyperparameterTuning;
}

std::string_view stage_name(StageId s);   // "preprocess", ...
std::string_view stage_title(StageId s);  // "Preprocessing", ...
StageId parse_stage(std::string_view name);

enum class DType { kNumeric, kCategorical, kBoolean, kText, kDatetime };
std::string_view dtype_name(DType t);
DType parse_dtype(std::string_view name);

struct ColumnSpec {
  std::string name;
  DType dtype = DType::kText;
  bool operator==(const ColumnSpec&) const = default;
};

using Cell = std::optional<std::string>;  // nullopt = missing value
using Record = std::vector<Cell>;         // aligned with column_specs

struct DataDescription {
  std::uint64_t row_count = 0;
  std::vector<ColumnSpec> column_specs;
  std::vector<Record> sample_records;
  std::vector<double> null_ratio;  // aligned with column_specs
  std::string source_path;

  bool operator==(const DataDescription&) const = default;
  // Throws kFormatError when an invariant does not hold.
  void validate() const;
  std::optional<std::size_t> column_index(std::string_view name) const;
};

enum class TaskKind {
  kBinaryClassification,
  kMulticlassClassification,
  kRegression,
};
enum class Metric { kAcc, kRocAuc, kRmse };

std::string_view task_kind_name(TaskKind k);
TaskKind parse_task_kind(std::string_view name);
std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);
constexpr bool is_classification(TaskKind k) { return k != TaskKind::kRegression; }

struct TaskDescription {
  TaskKind task_kind = TaskKind::kBinaryClassification;
  std::string target_column;
  Metric metric = Metric::kAcc;
  std::string background;

  bool operator==(const TaskDescription&) const = default;
  void validate() const;
  // Single-paragraph rendering used as the task slot in prompts.
  std::string render() const;
};

struct StageArtifact {
  StageId stage = StageId::kPreprocess;
  std::string code;
  std::variant<DataDescription, double> outcome;
  int attempt_count = 1;

  bool operator==(const StageArtifact&) const = default;
  void validate() const;
  const DataDescription* summary() const { return std::get_if<DataDescription>(&outcome); }
  std::optional<double> validation_score() const;
};

struct CandidatePlan {
  StageId stage = StageId::kPreprocess;
  int ordinal = 1;
  std::string plan_text;
  std::string rationale;
  std::string scenario;

  bool operator==(const CandidatePlan&) const = default;
};

struct PlanRef {
  StageId stage = StageId::kPreprocess;
  int ordinal = 1;
  bool operator==(const PlanRef&) const = default;
};

struct PlanLedger {
  std::map<StageId, StageArtifact> artifacts;
  std::vector<CandidatePlan> candidates;
  int max_candidates_per_stage = 2;

  bool operator==(const PlanLedger&) const = default;
  std::vector<CandidatePlan> plans_for(StageId s) const;
  const CandidatePlan& plan(PlanRef ref) const;  // throws kInvalidArgument
};

struct PipelinePath {
  int rank = 1;
  std::array<PlanRef, 4> choice;  // indexed by stage_index
  std::optional<std::string> final_code;

  bool operator==(const PipelinePath&) const = default;
  const PlanRef& at(StageId s) const { return choice[stage_index(s)]; }
};

enum class AttemptStatus { kOk, kExecError, kParseError, kWhitelistViolation, kTimeout };
std::string_view attempt_status_name(AttemptStatus s);
AttemptStatus parse_attempt_status(std::string_view name);

struct TokenEvent {
  std::uint64_t seq = 0;
  std::string step_label;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  bool operator==(const TokenEvent&) const = default;
};

// One execution attempt. `path_rank` is set for final-path realization
// attempts; stage attempts leave it empty.
struct AttemptLog {
  std::uint64_t seq = 0;
  StageId stage = StageId::kPreprocess;
  std::optional<int> path_rank;
  int attempt = 1;
  AttemptStatus status = AttemptStatus::kOk;
  std::string detail;
  bool operator==(const AttemptLog&) const = default;
};

// Token usage and attempt history of one run. Appends are thread-safe and
// totally ordered by a shared sequence counter.
class RunLedger {
 public:
  RunLedger() = default;
  RunLedger(const RunLedger& other);
  RunLedger& operator=(const RunLedger& other);

  std::uint64_t record_tokens(std::string step_label, std::uint64_t input_tokens,
                              std::uint64_t output_tokens);
  // Enforces contiguous attempt numbering per (stage, path_rank) run.
  std::uint64_t record_attempt(StageId stage, std::optional<int> path_rank, int attempt,
                               AttemptStatus status, std::string detail = {});

  std::vector<TokenEvent> token_events() const;
  std::vector<AttemptLog> attempt_logs() const;

  // Rebuilds a ledger from persisted events, preserving sequence numbers.
  static RunLedger restore(std::vector<TokenEvent> events, std::vector<AttemptLog> logs);

  bool operator==(const RunLedger& other) const;

 private:
  mutable std::mutex mu_;
  std::uint64_t next_seq_ = 1;
  std::vector<TokenEvent> token_events_;
  std::vector<AttemptLog> attempt_logs_;
};

}  // namespace spio
