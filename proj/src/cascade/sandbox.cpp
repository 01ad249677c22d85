#include "spio/sandbox.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <regex>

#include "spio/error.hpp"
#include "spio/process.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

constexpr std::array<std::string_view, 4> kStatusNames = {"ok", "nonzero_exit", "timeout", "missing_output"};

std::string format_timeout(double seconds) {
  // the runner takes whole seconds
  const auto whole = static_cast<long long>(std::ceil(std::max(1.0, seconds)));
  return std::to_string(whole);
}

RunManifest crash_manifest(int exit_code, double wall_time, std::string message) {
  RunManifest m;
  m.status = ManifestStatus::kNonzeroExit;
  m.exit_code = exit_code;
  m.wall_time = wall_time;
  m.stderr_tail = tail(message, kStderrTailChars);
  return m;
}

}  // namespace

std::string_view manifest_status_name(ManifestStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

ManifestStatus parse_manifest_status(std::string_view name) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == name) return static_cast<ManifestStatus>(i);
  }
  fail(ErrorCode::kFormatError, "unknown manifest status '" + std::string(name) + "'");
}

void to_json(Document& j, const RunManifest& v) {
  j = Document::object();
  j["status"] = manifest_status_name(v.status);
  j["exit_code"] = v.exit_code;
  j["wall_time"] = v.wall_time;
  j["stderr_tail"] = v.stderr_tail;
  Document outputs = Document::object();
  for (const auto& [path, desc] : v.outputs) {
    Document profile = desc;
    profile.erase("source_path");
    outputs[path] = std::move(profile);
  }
  j["outputs"] = std::move(outputs);
  if (v.validation_score) {
    j["validation_score"] = *v.validation_score;
  } else {
    j["validation_score"] = nullptr;
  }
}

void from_json(const Document& j, RunManifest& v) {
  v = RunManifest{};
  v.status = parse_manifest_status(j.at("status").get<std::string>());
  v.exit_code = j.at("exit_code").get<int>();
  v.wall_time = j.at("wall_time").get<double>();
  v.stderr_tail = j.value("stderr_tail", std::string{});
  if (const auto it = j.find("outputs"); it != j.end() && !it->is_null()) {
    for (const auto& [path, profile] : it->items()) {
      auto desc = profile.get<DataDescription>();
      desc.source_path = path;
      v.outputs.emplace(path, std::move(desc));
    }
  }
  if (const auto it = j.find("validation_score"); it != j.end() && !it->is_null()) {
    v.validation_score = it->get<double>();
  }
}

RunManifest parse_manifest(std::string_view text) {
  return decode<RunManifest>(parse_document(text));
}

std::optional<double> extract_score(std::string_view stdout_text) {
  static const std::regex kSentinel(R"(^VALIDATION_SCORE: ([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$)");
  std::optional<double> found;
  int matches = 0;
  for (auto line : split_lines(stdout_text)) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(line.begin(), line.end(), m, kSentinel)) continue;
    if (++matches > 1) fail(ErrorCode::kAmbiguousScore, "more than one VALIDATION_SCORE line");
    const std::string number = m[1].str();
    const char* first = number.data();
    if (*first == '+') ++first;
    double value = 0.0;
    std::from_chars(first, number.data() + number.size(), value);
    found = value;
  }
  return found;
}

std::vector<std::string> runner_argv(const std::vector<std::string>& command, const ExecRequest& request) {
  std::vector<std::string> argv = command;
  argv.insert(argv.end(), {"exec", "--source", request.source.string()});
  for (const auto& p : request.inputs) argv.insert(argv.end(), {"--input", p.string()});
  for (const auto& p : request.outputs) argv.insert(argv.end(), {"--output", p.string()});
  argv.insert(argv.end(), {"--timeout", format_timeout(request.timeout_s)});
  return argv;
}

ExternalRunner::ExternalRunner(std::vector<std::string> command, double grace_s)
    : command_(std::move(command)), grace_s_(grace_s) {
  if (command_.empty()) fail(ErrorCode::kConfigError, "runner command is empty");
}

RunManifest ExternalRunner::execute(const ExecRequest& request) {
  std::filesystem::create_directories(request.attempt_dir);
  const auto result = run_process(runner_argv(command_, request), request.attempt_dir,
                                  request.timeout_s + grace_s_);
  const auto stderr_log = request.attempt_dir / "stderr.log";
  if (!std::filesystem::exists(stderr_log)) write_file(stderr_log, result.stderr_text);
  if (!std::filesystem::exists(request.attempt_dir / "stdout.log")) write_file(request.attempt_dir / "stdout.log", "");

  if (result.timed_out) {
    return crash_manifest(-1, result.wall_time_s, "runner did not return within the timeout grace period");
  }
  if (result.exit_code != 0) {
    return crash_manifest(result.exit_code, result.wall_time_s,
                          "runner exited with code " + std::to_string(result.exit_code) + ": " +
                              result.stderr_text);
  }
  write_file(request.attempt_dir / "manifest.json", result.stdout_text);
  try {
    return parse_manifest(result.stdout_text);
  } catch (const Error& e) {
    return crash_manifest(-1, result.wall_time_s, std::string("unreadable runner manifest: ") + e.what());
  }
}

}  // namespace spio
