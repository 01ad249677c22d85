#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spio {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal
  bool timed_out = false;
  double wall_time_s = 0.0;
  std::string stdout_text;
  std::string stderr_text;
};

// Runs argv[0] (PATH lookup) in `cwd` as the leader of a new process group.
// On timeout the whole group is killed. Captured streams are capped at
// `capture_limit` bytes each; the rest is drained and dropped.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          double timeout_s, std::size_t capture_limit = 16u << 20);

// Last `max_chars` characters of `text`.
std::string tail(std::string_view text, std::size_t max_chars);

}  // namespace spio
