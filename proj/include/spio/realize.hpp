#pragma once

#include <filesystem>
#include <vector>

#include "spio/cascade.hpp"
#include "spio/predictions.hpp"

namespace spio {

struct RealizedPath {
  PipelinePath path;  // with final_code set
  PredictionSet predictions;
  int attempt_count = 1;
};

// workdir/final_<rank>
std::filesystem::path path_dir(const CascadeConfig& cfg, int rank);

// Generates one end-to-end program for the path from the original data,
// checks it against the union of all stage allow-sets and executes it with
// the attempt budget. Attempts are logged under the last stage with the
// path's rank. kStageFailed when the budget runs out;
// kPredictionShapeMismatch when the output length differs from the test set.
RealizedPath realize_path(const PipelinePath& path, const PlanLedger& ledger, RunLedger& run,
                          const CascadeEnv& env);

// Realizes several paths. Scripted providers run sequentially so replies are
// consumed in a fixed order; otherwise up to `workers` paths run at once.
std::vector<RealizedPath> realize_paths(const std::vector<PipelinePath>& paths, const PlanLedger& ledger,
                                        RunLedger& run, const CascadeEnv& env, int workers = 2);

}  // namespace spio
