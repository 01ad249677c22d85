#include "spio/cascade.hpp"

#include <sstream>

#include "spio/error.hpp"
#include "spio/ledger.hpp"
#include "spio/parsers.hpp"
#include "spio/process.hpp"
#include "spio/prompts.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

namespace fs = std::filesystem;

struct Outcome {
  AttemptStatus status = AttemptStatus::kOk;
  std::string detail;
  std::optional<StageArtifact> artifact;
};

std::string label(std::string_view step, StageId stage) {
  return std::string(step) + ":" + std::string(stage_name(stage));
}

std::string violation_list(const WhitelistReport& report) {
  std::ostringstream out;
  out << "Disallowed identifiers for this step:";
  for (const auto& v : report.violations) out << "\n- " << v.identifier << " (line " << v.line_number << ")";
  return out.str();
}

std::string repair_note(const Outcome& outcome, const std::string& stderr_tail) {
  std::string note = "Previous attempt failed: " + outcome.detail;
  if (!stderr_tail.empty()) note += "\n" + tail(stderr_tail, kStderrTailChars);
  return note;
}

// Most recent data-producing stage before `stage`.
const StageArtifact* latest_data_artifact(const PlanLedger& ledger, StageId stage) {
  const StageArtifact* found = nullptr;
  for (const auto& [s, artifact] : ledger.artifacts) {
    if (precedes(s, stage) && !stage_has_score(s)) found = &artifact;
  }
  return found;
}

Outcome judge(StageId stage, const IoPaths& io, const RunManifest& manifest, const CascadeEnv& env,
              const std::string& code, int attempt) {
  Outcome out;
  switch (manifest.status) {
    case ManifestStatus::kTimeout:
      out.status = AttemptStatus::kTimeout;
      out.detail = "execution timed out after " + format_double(manifest.wall_time) + " s";
      return out;
    case ManifestStatus::kNonzeroExit:
      out.status = AttemptStatus::kExecError;
      out.detail = "script exited with code " + std::to_string(manifest.exit_code);
      return out;
    case ManifestStatus::kMissingOutput:
      out.status = AttemptStatus::kExecError;
      out.detail = "script did not write every declared output file";
      return out;
    case ManifestStatus::kOk: break;
  }
  out.status = AttemptStatus::kExecError;
  if (stage_has_score(stage)) {
    if (!manifest.validation_score) {
      out.detail = "script did not print exactly one VALIDATION_SCORE line";
      return out;
    }
    out.status = AttemptStatus::kOk;
    out.artifact = StageArtifact{stage, code, *manifest.validation_score, attempt};
    return out;
  }
  const auto train = manifest.outputs.find(*io.train_output);
  const auto test = manifest.outputs.find(*io.test_output);
  if (train == manifest.outputs.end() || test == manifest.outputs.end()) {
    out.detail = "runner manifest lacks a profile for a declared output";
    return out;
  }
  if (test->second.row_count != env.inputs.test_rows) {
    out.detail = "test output has " + std::to_string(test->second.row_count) + " rows, expected " +
                 std::to_string(env.inputs.test_rows) + "; the length of the test set must remain unchanged";
    return out;
  }
  out.status = AttemptStatus::kOk;
  DataDescription summary = train->second;
  summary.source_path = *io.train_output;
  out.artifact = StageArtifact{stage, code, std::move(summary), attempt};
  return out;
}

}  // namespace

void CascadeConfig::validate() const {
  if (max_candidates < 1) fail(ErrorCode::kConfigError, "max_candidates must be >= 1");
  if (attempt_budget < 1) fail(ErrorCode::kConfigError, "attempt_budget must be >= 1");
  if (!(per_stage_timeout_s > 0)) fail(ErrorCode::kConfigError, "per_stage_timeout must be positive");
  if (workdir.empty()) fail(ErrorCode::kConfigError, "workdir is empty");
  if (sample_size < 1) fail(ErrorCode::kConfigError, "sample_size must be >= 1");
}

WhitelistReport check_whitelist(std::string_view code, StageId stage, const CascadeConfig& cfg) {
  return check_whitelist(code, stage, cfg.whitelist);
}

CascadeInputs load_inputs(const fs::path& train_path, const fs::path& test_path, TaskDescription task,
                          std::size_t sample_size) {
  task.validate();
  CascadeInputs inputs;
  inputs.train_path = fs::absolute(train_path);
  inputs.test_path = fs::absolute(test_path);
  inputs.data = describe_dataset(inputs.train_path, sample_size);
  if (!inputs.data.column_index(task.target_column)) {
    fail(ErrorCode::kConfigError, "target column '" + task.target_column + "' not in " + train_path.string());
  }
  inputs.test_rows = read_csv(inputs.test_path).rows.size();
  inputs.task = std::move(task);
  return inputs;
}

fs::path stage_dir(const CascadeConfig& cfg, StageId stage) {
  return cfg.workdir / ("stage_" + std::to_string(stage_index(stage) + 1));
}

IoPaths stage_io(const CascadeEnv& env, StageId stage) {
  IoPaths io;
  // Model selection and tuning both read the feature-engineered data.
  const std::optional<StageId> source =
      stage == StageId::kPreprocess           ? std::nullopt
      : stage == StageId::kFeatureEngineering ? std::optional(StageId::kPreprocess)
                                              : std::optional(StageId::kFeatureEngineering);
  if (source) {
    io.train_input = (stage_dir(env.cfg, *source) / "train.csv").string();
    io.test_input = (stage_dir(env.cfg, *source) / "test.csv").string();
  } else {
    io.train_input = env.inputs.train_path.string();
    io.test_input = env.inputs.test_path.string();
  }
  if (!stage_has_score(stage)) {
    io.train_output = (stage_dir(env.cfg, stage) / "train.csv").string();
    io.test_output = (stage_dir(env.cfg, stage) / "test.csv").string();
  }
  return io;
}

StageArtifact execute_stage(StageId stage, const PlanLedger& ledger, RunLedger& run, const CascadeEnv& env) {
  for (StageId s : kAllStages) {
    if (precedes(s, stage) && !ledger.artifacts.contains(s)) {
      fail(ErrorCode::kOutOfOrderStage, std::string(stage_name(stage)) + " requires " +
                                            std::string(stage_name(s)) + " to be recorded first");
    }
  }
  const IoPaths io = stage_io(env, stage);
  PromptContext ctx;
  ctx.task_text = env.inputs.task.render();
  ctx.data_summary = render_summary(env.inputs.data);
  ctx.io_paths = io;
  ctx.max_candidates = env.cfg.max_candidates;
  if (stage != StageId::kPreprocess) {
    const auto prev = kAllStages[stage_index(stage) - 1];
    ctx.prior_code = ledger.artifacts.at(prev).code;
    if (const auto* data = latest_data_artifact(ledger, stage)) ctx.stage_summary = render_summary(*data->summary());
  }

  std::vector<fs::path> outputs;
  if (io.train_output) outputs = {*io.train_output, *io.test_output};
  const fs::path dir = stage_dir(env.cfg, stage);
  fs::create_directories(dir);

  std::string last_detail;
  for (int attempt = 1; attempt <= env.cfg.attempt_budget; ++attempt) {
    const fs::path attempt_dir = dir / ("attempt_" + std::to_string(attempt));
    fs::create_directories(attempt_dir);
    const auto response =
        env.gateway.complete(GenerationRequest{label("codegen", stage), render_codegen(stage, ctx)}, run);

    Outcome outcome;
    std::string stderr_tail;
    std::string code;
    try {
      code = extract_code(response.text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCodeFound) throw;
      outcome = {AttemptStatus::kParseError, "the response did not contain a code block", {}};
    }
    if (!code.empty()) {
      write_file(attempt_dir / "code.src", code);
      const auto report = check_whitelist(code, stage, env.cfg);
      if (!report.compliant()) {
        outcome = {AttemptStatus::kWhitelistViolation, violation_list(report), {}};
      } else {
        for (const auto& p : outputs) fs::remove(p);
        const auto manifest = env.sandbox.execute(
            ExecRequest{attempt_dir / "code.src", {io.train_input, io.test_input}, outputs,
                        env.cfg.per_stage_timeout_s, attempt_dir});
        stderr_tail = manifest.stderr_tail;
        outcome = judge(stage, io, manifest, env, code, attempt);
      }
    }
    run.record_attempt(stage, std::nullopt, attempt, outcome.status, outcome.detail);
    if (outcome.artifact) return *outcome.artifact;
    last_detail = outcome.detail;
    ctx.repair_context = repair_note(outcome, stderr_tail);
  }
  fail(ErrorCode::kStageFailed, std::string(stage_name(stage)) + " failed after " +
                                    std::to_string(env.cfg.attempt_budget) + " attempts; last error: " +
                                    last_detail);
}

std::vector<CandidatePlan> plan_stage(StageId stage, const PlanLedger& ledger, RunLedger& run,
                                      const CascadeEnv& env) {
  const auto found = ledger.artifacts.find(stage);
  if (found == ledger.artifacts.end()) {
    fail(ErrorCode::kStageArtifactMissing, std::string(stage_name(stage)));
  }
  const StageArtifact& artifact = found->second;
  PromptContext ctx;
  ctx.task_text = env.inputs.task.render();
  ctx.data_summary = render_summary(env.inputs.data);
  ctx.prior_code = artifact.code;
  ctx.max_candidates = env.cfg.max_candidates;
  if (const auto* summary = artifact.summary()) {
    ctx.stage_summary = render_summary(*summary);
  } else {
    ctx.prior_score = artifact.validation_score();
  }
  ctx.plan_ledger_view = render_plan_list(plans_before(ledger, stage));
  const std::string prompt = render_planning(stage, ctx);

  constexpr int kTries = 2;
  for (int attempt = 1; attempt <= kTries; ++attempt) {
    const auto response = env.gateway.complete(GenerationRequest{label("planning", stage), prompt}, run);
    try {
      const auto parsed = extract_plans(response.text, env.cfg.max_candidates);
      std::vector<CandidatePlan> plans;
      int ordinal = 1;
      for (const auto& p : parsed.plans) {
        plans.push_back(CandidatePlan{stage, ordinal++, p.plan_text, p.rationale, p.scenario});
      }
      return plans;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoPlansFound) throw;
    }
  }
  fail(ErrorCode::kPlanningFailed, std::string(stage_name(stage)) + ": no plans found after re-asking");
}

PlanLedger run_cascade(RunLedger& run, const CascadeEnv& env,
                       const std::function<void(const PlanLedger&)>& on_stage) {
  env.cfg.validate();
  PlanLedger ledger;
  ledger.max_candidates_per_stage = env.cfg.max_candidates;
  for (StageId stage : kAllStages) {
    ledger = record_artifact(ledger, execute_stage(stage, ledger, run, env));
    ledger = append_candidates(ledger, stage, plan_stage(stage, ledger, run, env));
    if (on_stage) on_stage(ledger);
  }
  return ledger;
}

}  // namespace spio
