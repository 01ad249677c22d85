#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spio/types.hpp"

namespace spio {

// RFC 4180-style delimited table: quoted fields, doubled quotes, CRLF or LF.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, char delimiter = ',');
CsvTable read_csv(const std::filesystem::path& path, char delimiter = ',');
std::string format_csv(const CsvTable& table, char delimiter = ',');
void write_csv(const std::filesystem::path& path, const CsvTable& table, char delimiter = ',');

inline constexpr std::size_t kDefaultSampleSize = 5;

// Profiles a table: dtypes, null ratios and the first `sample_size` rows.
// Empty (or all-whitespace) cells count as missing.
DataDescription describe_table(const CsvTable& table, std::size_t sample_size,
                               std::string source_path);

DataDescription describe_dataset(const std::filesystem::path& csv_path,
                                 std::size_t sample_size = kDefaultSampleSize);

// Fraction of missing cells over all columns except `exclude_column`.
double overall_null_ratio(const DataDescription& desc,
                          std::optional<std::string_view> exclude_column = std::nullopt);

// Plain-text rendering of a description, used for the data slots in prompts.
std::string render_summary(const DataDescription& desc);

}  // namespace spio
