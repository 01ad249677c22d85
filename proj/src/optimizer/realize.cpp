#include "spio/realize.hpp"

#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "spio/error.hpp"
#include "spio/parsers.hpp"
#include "spio/process.hpp"
#include "spio/prompts.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace fs = std::filesystem;

fs::path path_dir(const CascadeConfig& cfg, int rank) {
  return cfg.workdir / ("final_" + std::to_string(rank));
}

RealizedPath realize_path(const PipelinePath& path, const PlanLedger& ledger, RunLedger& run,
                          const CascadeEnv& env) {
  constexpr StageId kLogStage = StageId::kHyperparameterTuning;
  const fs::path dir = path_dir(env.cfg, path.rank);
  const fs::path predictions_file = dir / "predictions.csv";
  const AllowSet allow = union_allow_set(env.cfg.whitelist);

  FinalCodegenContext ctx;
  ctx.task_text = env.inputs.task.render();
  ctx.data_summary = render_summary(env.inputs.data);
  ctx.task = env.inputs.task;
  for (StageId s : kAllStages) ctx.plan_texts[stage_index(s)] = ledger.plan(path.at(s)).plan_text;
  ctx.train_input = env.inputs.train_path.string();
  ctx.test_input = env.inputs.test_path.string();
  ctx.predictions_output = predictions_file.string();

  const std::string step = "final_codegen:path" + std::to_string(path.rank);
  std::string last_detail;
  for (int attempt = 1; attempt <= env.cfg.attempt_budget; ++attempt) {
    const fs::path attempt_dir = dir / ("attempt_" + std::to_string(attempt));
    fs::create_directories(attempt_dir);
    const auto response = env.gateway.complete(GenerationRequest{step, render_final_codegen(ctx)}, run);

    AttemptStatus status = AttemptStatus::kExecError;
    std::string detail;
    std::string stderr_tail;
    std::string code;
    try {
      code = extract_code(response.text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCodeFound) throw;
      status = AttemptStatus::kParseError;
      detail = "the response did not contain a code block";
    }
    if (!code.empty()) {
      write_file(attempt_dir / "code.src", code);
      const auto report = check_whitelist(code, kLogStage, allow);
      if (!report.compliant()) {
        status = AttemptStatus::kWhitelistViolation;
        std::ostringstream out;
        out << "Disallowed identifiers:";
        for (const auto& v : report.violations) out << "\n- " << v.identifier << " (line " << v.line_number << ")";
        detail = out.str();
      } else {
        fs::remove(predictions_file);
        const auto manifest = env.sandbox.execute(ExecRequest{
            attempt_dir / "code.src", {env.inputs.train_path, env.inputs.test_path}, {predictions_file},
            env.cfg.per_stage_timeout_s, attempt_dir});
        stderr_tail = manifest.stderr_tail;
        if (manifest.status == ManifestStatus::kTimeout) {
          status = AttemptStatus::kTimeout;
          detail = "execution timed out";
        } else if (manifest.status != ManifestStatus::kOk) {
          detail = "script failed with status " + std::string(manifest_status_name(manifest.status));
        } else {
          PredictionSet predictions;
          try {
            predictions = read_predictions(predictions_file, env.inputs.task.task_kind);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kFormatError && e.code() != ErrorCode::kMalformedCsv &&
                e.code() != ErrorCode::kFileNotFound && e.code() != ErrorCode::kInvalidArgument) {
              throw;
            }
            detail = std::string("unreadable predictions file: ") + e.what();
          }
          if (detail.empty()) {
            if (predictions.instance_count() != env.inputs.test_rows) {
              run.record_attempt(kLogStage, path.rank, attempt, AttemptStatus::kExecError, "prediction count mismatch");
              fail(ErrorCode::kPredictionShapeMismatch,
                   "path " + std::to_string(path.rank) + " wrote " + std::to_string(predictions.instance_count()) +
                       " predictions for " + std::to_string(env.inputs.test_rows) + " test rows");
            }
            run.record_attempt(kLogStage, path.rank, attempt, AttemptStatus::kOk);
            RealizedPath out{path, std::move(predictions), attempt};
            out.path.final_code = code;
            return out;
          }
        }
      }
    }
    run.record_attempt(kLogStage, path.rank, attempt, status, detail);
    last_detail = detail;
    ctx.repair_context = "Previous attempt failed: " + detail +
                         (stderr_tail.empty() ? "" : "\n" + tail(stderr_tail, kStderrTailChars));
  }
  fail(ErrorCode::kStageFailed, "path " + std::to_string(path.rank) + " failed after " +
                                    std::to_string(env.cfg.attempt_budget) + " attempts; last error: " + last_detail);
}

std::vector<RealizedPath> realize_paths(const std::vector<PipelinePath>& paths, const PlanLedger& ledger,
                                        RunLedger& run, const CascadeEnv& env, int workers) {
  std::vector<std::optional<RealizedPath>> slots(paths.size());
  if (env.gateway.is_scripted() || workers <= 1 || paths.size() <= 1) {
    for (std::size_t i = 0; i < paths.size(); ++i) slots[i] = realize_path(paths[i], ledger, run, env);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(paths.size());
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), paths.size());
    for (std::size_t w = 0; w < count; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) {
          try {
            slots[i] = realize_path(paths[i], ledger, run, env);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<RealizedPath> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace spio
