#include "spio/types.hpp"

#include <algorithm>
#include <sstream>

#include "spio/error.hpp"

namespace spio {

namespace {

template <typename Enum, std::size_t N>
Enum parse_named(std::string_view name, const std::array<std::pair<Enum, std::string_view>, N>& table,
                 std::string_view what) {
  for (const auto& [value, label] : table) {
    if (label == name) return value;
  }
  fail(ErrorCode::kFormatError, "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [v, label] : table) {
    if (v == value) return label;
  }
  return "?";
}

constexpr std::array<std::pair<StageId, std::string_view>, 4> kStageNames = {{
    {StageId::kPreprocess, "preprocess"},
    {StageId::kFeatureEngineering, "feature_engineering"},
    {StageId::kModelSelection, "model_selection"},
    {StageId::kHyperparameterTuning, "hyperparameter_tuning"},
}};

constexpr std::array<std::pair<StageId, std::string_view>, 4> kStageTitles = {{
    {StageId::kPreprocess, "Preprocessing"},
    {StageId::kFeatureEngineering, "Feature Engineering"},
    {StageId::kModelSelection, "Model Selection"},
    {StageId::kHyperparameterTuning, "Hyperparameter Tuning"},
}};

constexpr std::array<std::pair<DType, std::string_view>, 5> kDTypeNames = {{
    {DType::kNumeric, "numeric"},
    {DType::kCategorical, "categorical"},
    {DType::kBoolean, "boolean"},
    {DType::kText, "text"},
    {DType::kDatetime, "datetime"},
}};

constexpr std::array<std::pair<TaskKind, std::string_view>, 3> kTaskKindNames = {{
    {TaskKind::kBinaryClassification, "binary_classification"},
    {TaskKind::kMulticlassClassification, "multiclass_classification"},
    {TaskKind::kRegression, "regression"},
}};

constexpr std::array<std::pair<Metric, std::string_view>, 3> kMetricNames = {{
    {Metric::kAcc, "ACC"},
    {Metric::kRocAuc, "ROC_AUC"},
    {Metric::kRmse, "RMSE"},
}};

constexpr std::array<std::pair<AttemptStatus, std::string_view>, 5> kStatusNames = {{
    {AttemptStatus::kOk, "ok"},
    {AttemptStatus::kExecError, "exec_error"},
    {AttemptStatus::kParseError, "parse_error"},
    {AttemptStatus::kWhitelistViolation, "whitelist_violation"},
    {AttemptStatus::kTimeout, "timeout"},
}};

}  // namespace

std::string_view stage_name(StageId s) { return name_of(s, kStageNames); }
std::string_view stage_title(StageId s) { return name_of(s, kStageTitles); }
StageId parse_stage(std::string_view name) { return parse_named(name, kStageNames, "stage"); }

std::string_view dtype_name(DType t) { return name_of(t, kDTypeNames); }
DType parse_dtype(std::string_view name) { return parse_named(name, kDTypeNames, "dtype"); }

std::string_view task_kind_name(TaskKind k) { return name_of(k, kTaskKindNames); }
TaskKind parse_task_kind(std::string_view name) {
  return parse_named(name, kTaskKindNames, "task kind");
}
std::string_view metric_name(Metric m) { return name_of(m, kMetricNames); }
Metric parse_metric(std::string_view name) { return parse_named(name, kMetricNames, "metric"); }

std::string_view attempt_status_name(AttemptStatus s) { return name_of(s, kStatusNames); }
AttemptStatus parse_attempt_status(std::string_view name) {
  return parse_named(name, kStatusNames, "attempt status");
}

void DataDescription::validate() const {
  if (null_ratio.size() != column_specs.size()) {
    fail(ErrorCode::kFormatError, "null_ratio has " + std::to_string(null_ratio.size()) +
                                      " entries for " + std::to_string(column_specs.size()) +
                                      " columns");
  }
  for (std::size_t i = 0; i < null_ratio.size(); ++i) {
    if (!(null_ratio[i] >= 0.0 && null_ratio[i] <= 1.0)) {
      fail(ErrorCode::kFormatError, "null_ratio of column '" + column_specs[i].name +
                                        "' outside [0,1]");
    }
  }
  for (const auto& record : sample_records) {
    if (record.size() != column_specs.size()) {
      fail(ErrorCode::kFormatError, "sample record does not match declared columns");
    }
  }
  if (row_count < sample_records.size()) {
    fail(ErrorCode::kFormatError, "row_count smaller than number of sample records");
  }
}

std::optional<std::size_t> DataDescription::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_specs.size(); ++i) {
    if (column_specs[i].name == name) return i;
  }
  return std::nullopt;
}

void TaskDescription::validate() const {
  if (target_column.empty()) fail(ErrorCode::kConfigError, "task target_column is empty");
  const bool regression = task_kind == TaskKind::kRegression;
  if ((metric == Metric::kRmse) != regression) {
    fail(ErrorCode::kConfigError, "metric " + std::string(metric_name(metric)) +
                                      " is incompatible with task kind " +
                                      std::string(task_kind_name(task_kind)));
  }
}

std::string TaskDescription::render() const {
  std::ostringstream out;
  out << "Prediction type: " << task_kind_name(task_kind) << "; target column: " << target_column
      << "; evaluation metric: " << metric_name(metric) << ".";
  if (!background.empty()) out << " " << background;
  return out.str();
}

void StageArtifact::validate() const {
  if (attempt_count < 1) fail(ErrorCode::kInvalidArgument, "attempt_count must be >= 1");
  const bool has_score = std::holds_alternative<double>(outcome);
  if (has_score != stage_has_score(stage)) {
    fail(ErrorCode::kInvalidArgument,
         "artifact outcome does not match stage " + std::string(stage_name(stage)));
  }
}

std::optional<double> StageArtifact::validation_score() const {
  if (const auto* v = std::get_if<double>(&outcome)) return *v;
  return std::nullopt;
}

std::vector<CandidatePlan> PlanLedger::plans_for(StageId s) const {
  std::vector<CandidatePlan> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [s](const CandidatePlan& p) { return p.stage == s; });
  return out;
}

const CandidatePlan& PlanLedger::plan(PlanRef ref) const {
  for (const auto& p : candidates) {
    if (p.stage == ref.stage && p.ordinal == ref.ordinal) return p;
  }
  fail(ErrorCode::kInvalidArgument, "no plan " + std::to_string(ref.ordinal) + " for stage " +
                                        std::string(stage_name(ref.stage)));
}

RunLedger::RunLedger(const RunLedger& other) {
  std::lock_guard lock(other.mu_);
  next_seq_ = other.next_seq_;
  token_events_ = other.token_events_;
  attempt_logs_ = other.attempt_logs_;
}

RunLedger& RunLedger::operator=(const RunLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  next_seq_ = other.next_seq_;
  token_events_ = other.token_events_;
  attempt_logs_ = other.attempt_logs_;
  return *this;
}

std::uint64_t RunLedger::record_tokens(std::string step_label, std::uint64_t input_tokens,
                                       std::uint64_t output_tokens) {
  std::lock_guard lock(mu_);
  const auto seq = next_seq_++;
  token_events_.push_back({seq, std::move(step_label), input_tokens, output_tokens});
  return seq;
}

std::uint64_t RunLedger::record_attempt(StageId stage, std::optional<int> path_rank, int attempt,
                                        AttemptStatus status, std::string detail) {
  std::lock_guard lock(mu_);
  const AttemptLog* previous = nullptr;
  for (auto it = attempt_logs_.rbegin(); it != attempt_logs_.rend(); ++it) {
    if (it->stage == stage && it->path_rank == path_rank) {
      previous = &*it;
      break;
    }
  }
  // A new run of the same scope restarts at 1; otherwise numbering continues
  // the unfinished run.
  const bool restart = attempt == 1;
  const bool continues =
      previous != nullptr && previous->status != AttemptStatus::kOk && previous->attempt + 1 == attempt;
  if (!restart && !continues) {
    fail(ErrorCode::kInvalidArgument, "attempt " + std::to_string(attempt) + " for stage " +
                                          std::string(stage_name(stage)) +
                                          " breaks contiguous numbering");
  }
  const auto seq = next_seq_++;
  attempt_logs_.push_back({seq, stage, path_rank, attempt, status, std::move(detail)});
  return seq;
}

std::vector<TokenEvent> RunLedger::token_events() const {
  std::lock_guard lock(mu_);
  return token_events_;
}

std::vector<AttemptLog> RunLedger::attempt_logs() const {
  std::lock_guard lock(mu_);
  return attempt_logs_;
}

RunLedger RunLedger::restore(std::vector<TokenEvent> events, std::vector<AttemptLog> logs) {
  RunLedger ledger;
  std::uint64_t max_seq = 0;
  for (const auto& e : events) max_seq = std::max(max_seq, e.seq);
  for (const auto& l : logs) max_seq = std::max(max_seq, l.seq);
  ledger.next_seq_ = max_seq + 1;
  ledger.token_events_ = std::move(events);
  ledger.attempt_logs_ = std::move(logs);
  return ledger;
}

bool RunLedger::operator==(const RunLedger& other) const {
  if (this == &other) return true;
  std::scoped_lock lock(mu_, other.mu_);
  return token_events_ == other.token_events_ && attempt_logs_ == other.attempt_logs_;
}

}  // namespace spio
