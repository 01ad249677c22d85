#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spio/serialize.hpp"
#include "spio/types.hpp"

namespace spio {

enum class ManifestStatus { kOk, kNonzeroExit, kTimeout, kMissingOutput };
std::string_view manifest_status_name(ManifestStatus s);
ManifestStatus parse_manifest_status(std::string_view name);

// Result document printed by the runner for one script execution.
struct RunManifest {
  ManifestStatus status = ManifestStatus::kOk;
  int exit_code = 0;
  double wall_time = 0.0;
  std::string stderr_tail;  // at most kStderrTailChars
  std::map<std::string, DataDescription> outputs;  // declared path -> profile
  std::optional<double> validation_score;
  bool operator==(const RunManifest&) const = default;
};

inline constexpr std::size_t kStderrTailChars = 2000;

void to_json(Document& j, const RunManifest& v);
void from_json(const Document& j, RunManifest& v);
// kMalformedJson for bad syntax, kFormatError for schema problems.
RunManifest parse_manifest(std::string_view text);

// Value of the single `VALIDATION_SCORE: <float>` line in `stdout_text`,
// nullopt when there is none, kAmbiguousScore when there are several.
std::optional<double> extract_score(std::string_view stdout_text);

struct ExecRequest {
  std::filesystem::path source;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double timeout_s = 600.0;
  // Attempt directory; receives manifest.json and the runner's logs.
  std::filesystem::path attempt_dir;
};

class SandboxExecutor {
 public:
  virtual ~SandboxExecutor() = default;
  virtual RunManifest execute(const ExecRequest& request) = 0;
};

// Command line for one dispatch:
//   <command...> exec --source <file> --input <p>... --output <p>... --timeout <s>
std::vector<std::string> runner_argv(const std::vector<std::string>& command, const ExecRequest& request);

// Invokes an external runner process per dispatch and parses the manifest it
// prints. Runner crashes are reported as kNonzeroExit manifests.
class ExternalRunner : public SandboxExecutor {
 public:
  explicit ExternalRunner(std::vector<std::string> command = {"runner"}, double grace_s = 30.0);
  RunManifest execute(const ExecRequest& request) override;
  const std::vector<std::string>& command() const { return command_; }

 private:
  std::vector<std::string> command_;
  double grace_s_;
};

}  // namespace spio
