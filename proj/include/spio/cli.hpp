#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spio/cascade.hpp"
#include "spio/error.hpp"
#include "spio/gateway.hpp"
#include "spio/serialize.hpp"
#include "spio/split.hpp"
#include "spio/types.hpp"

namespace spio::cli {

enum class Mode { kSpioS, kSpioE };
std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

// A single labelled dataset split by the engine instead of separate files.
struct SplitConfig {
  std::filesystem::path dataset_path;
  SplitScheme scheme;
};

struct EmbeddingConfig {
  std::string kind = "hashing";  // or "http"
  std::size_t dimension = 256;
  std::string endpoint;
  std::string model_name;
  std::string api_key_env;
};

struct RunConfig {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::optional<SplitConfig> split;
  TaskDescription task;
  Mode mode = Mode::kSpioE;
  int k = 2;
  int n = 2;
  ProviderConfig provider;
  CascadeConfig cascade;  // workdir is filled in per run
  std::vector<std::string> runner_command{"runner"};
  std::uint64_t seed = 0;
  std::string run_id;
  int workers = 2;
  EmbeddingConfig embedding;

  void validate() const;  // kConfigError
};

struct Overrides {
  std::optional<Mode> mode;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<ProviderKind> provider_kind;
  std::optional<int> workers;
  std::optional<std::string> run_id;
};

// Reads the JSON run configuration. Relative paths resolve against the
// config file's directory. Every problem surfaces as kConfigError.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
Document config_document(const RunConfig& config);

// Exit status classes of the command-line tool.
enum class ExitClass { kInternal = 1, kConfig = 2, kStage = 3, kSelection = 4, kProvider = 5 };
ExitClass exit_class(ErrorCode code);
std::string_view exit_class_name(ExitClass c);  // "config", "stage", ...

// Root for run directories: $SPIO_WORKDIR or ./runs.
std::filesystem::path runs_root();

// Entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spio::cli
