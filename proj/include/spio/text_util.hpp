#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spio {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view text);

// Lowercased alphanumeric runs.
std::vector<std::string> word_tokens(std::string_view text);
// Lowercase and collapse every whitespace run to one space; trims the ends.
std::string normalize_whitespace(std::string_view text);

// Shortest decimal representation that round-trips.
std::string format_double(double value);
// Fixed-point with six decimals, the report format.
std::string format_fixed6(double value);
std::string number_word(int n);  // "one".."ten", digits beyond

std::string read_file(const std::filesystem::path& path);
// Writes atomically enough for our purposes: parent dirs are created, content
// is written with LF endings as given.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace spio
