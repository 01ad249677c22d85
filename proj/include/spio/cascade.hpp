#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "spio/dataset.hpp"
#include "spio/gateway.hpp"
#include "spio/prompts.hpp"
#include "spio/sandbox.hpp"
#include "spio/types.hpp"
#include "spio/whitelist.hpp"

namespace spio {

struct CascadeConfig {
  int max_candidates = 2;    // n
  int attempt_budget = 10;   // K
  double per_stage_timeout_s = 600.0;
  Whitelist whitelist = default_whitelist();
  std::filesystem::path workdir;
  std::size_t sample_size = kDefaultSampleSize;

  void validate() const;  // kConfigError
};

WhitelistReport check_whitelist(std::string_view code, StageId stage, const CascadeConfig& cfg);

// Original train/test files with their profiles.
struct CascadeInputs {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  TaskDescription task;
  DataDescription data;  // profile of the training file
  std::uint64_t test_rows = 0;
};

CascadeInputs load_inputs(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                          TaskDescription task, std::size_t sample_size = kDefaultSampleSize);

// Everything a stage needs besides the ledgers.
struct CascadeEnv {
  const CascadeConfig& cfg;
  const CascadeInputs& inputs;
  Gateway& gateway;
  SandboxExecutor& sandbox;
};

// workdir/stage_<i>, i counted from 1.
std::filesystem::path stage_dir(const CascadeConfig& cfg, StageId stage);

// Files a stage reads and (for the first two stages) writes.
IoPaths stage_io(const CascadeEnv& env, StageId stage);

// Generates, checks and executes code for one stage, retrying with a repair
// note up to K times. kStageFailed when the budget runs out.
StageArtifact execute_stage(StageId stage, const PlanLedger& ledger, RunLedger& run, const CascadeEnv& env);

// Asks for up to n alternative plans for a recorded stage. One re-ask when
// the reply has no parseable plans, then kPlanningFailed.
std::vector<CandidatePlan> plan_stage(StageId stage, const PlanLedger& ledger, RunLedger& run,
                                      const CascadeEnv& env);

// Runs all four stages in order. `on_stage` sees the ledger after each stage
// has its artifact and plans.
PlanLedger run_cascade(RunLedger& run, const CascadeEnv& env,
                       const std::function<void(const PlanLedger&)>& on_stage = {});

}  // namespace spio
