#include "spio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is not a record.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      // swallowed; the following \n ends the record
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) fail(ErrorCode::kMalformedCsv, "unterminated quoted field near line " + std::to_string(line));
  if (field_started || !field.empty() || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      fail(ErrorCode::kMalformedCsv, "row " + std::to_string(r) + " has " +
                                         std::to_string(records[r].size()) + " fields, header has " +
                                         std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, char delimiter) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::kFileNotFound, path.string());
  }
  return parse_csv(read_file(path), delimiter);
}

std::string format_csv(const CsvTable& table, char delimiter) {
  std::string out;
  auto emit_field = [&](const std::string& f) {
    const bool quote = f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
    if (!quote) {
      out += f;
      return;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  };
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(delimiter);
      emit_field(row[i]);
    }
    out.push_back('\n');
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, char delimiter) {
  write_file(path, format_csv(table, delimiter));
}

namespace {

bool is_missing(std::string_view cell) { return trim(cell).empty(); }

bool parses_as_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

bool is_boolean_token(std::string_view cell) {
  const auto lowered = to_lower(trim(cell));
  return lowered == "true" || lowered == "false" || lowered == "0" || lowered == "1";
}

bool is_datetime(std::string_view cell) {
  static const std::regex kIsoDate(
      R"(^\d{4}-\d{2}-\d{2}([ T]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  const auto t = trim(cell);
  return std::regex_match(t.begin(), t.end(), kIsoDate);
}

DType infer_dtype(const CsvTable& table, std::size_t col) {
  std::size_t present = 0;
  bool all_bool = true, all_num = true, all_date = true;
  std::unordered_set<std::string_view> distinct;
  for (const auto& row : table.rows) {
    const std::string_view cell = row[col];
    if (is_missing(cell)) continue;
    ++present;
    all_bool = all_bool && is_boolean_token(cell);
    all_num = all_num && parses_as_number(cell);
    all_date = all_date && is_datetime(cell);
    distinct.insert(trim(cell));
  }
  if (present > 0) {
    if (all_bool) return DType::kBoolean;
    if (all_num) return DType::kNumeric;
    if (all_date) return DType::kDatetime;
  }
  // categorical iff distinct <= max(20, 5% of rows)
  const std::size_t rows = table.rows.size();
  if (distinct.size() <= 20 || distinct.size() * 20 <= rows) return DType::kCategorical;
  return DType::kText;
}

}  // namespace

DataDescription describe_table(const CsvTable& table, std::size_t sample_size,
                               std::string source_path) {
  if (table.header.empty()) fail(ErrorCode::kMalformedCsv, "missing header row: " + source_path);
  if (table.rows.empty()) fail(ErrorCode::kEmptyDataset, source_path);

  DataDescription desc;
  desc.row_count = table.rows.size();
  desc.source_path = std::move(source_path);
  const std::size_t cols = table.header.size();
  desc.column_specs.reserve(cols);
  desc.null_ratio.reserve(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    desc.column_specs.push_back({table.header[c], infer_dtype(table, c)});
    const auto missing = std::count_if(table.rows.begin(), table.rows.end(),
                                       [c](const auto& row) { return is_missing(row[c]); });
    desc.null_ratio.push_back(static_cast<double>(missing) / static_cast<double>(table.rows.size()));
  }
  const std::size_t take = std::min(sample_size, table.rows.size());
  for (std::size_t r = 0; r < take; ++r) {
    Record record;
    record.reserve(cols);
    for (const auto& cell : table.rows[r]) {
      record.push_back(is_missing(cell) ? Cell{} : Cell{cell});
    }
    desc.sample_records.push_back(std::move(record));
  }
  return desc;
}

DataDescription describe_dataset(const std::filesystem::path& csv_path, std::size_t sample_size) {
  if (sample_size == 0) fail(ErrorCode::kInvalidArgument, "sample_size must be positive");
  return describe_table(read_csv(csv_path), sample_size, csv_path.string());
}

double overall_null_ratio(const DataDescription& desc, std::optional<std::string_view> exclude_column) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < desc.column_specs.size(); ++i) {
    if (exclude_column && desc.column_specs[i].name == *exclude_column) continue;
    sum += desc.null_ratio[i];
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

std::string render_summary(const DataDescription& desc) {
  std::ostringstream out;
  out << "Shape: " << desc.row_count << " rows x " << desc.column_specs.size() << " columns\n";
  out << "Columns:\n";
  for (std::size_t i = 0; i < desc.column_specs.size(); ++i) {
    out << "- " << desc.column_specs[i].name << ": " << dtype_name(desc.column_specs[i].dtype)
        << ", null ratio " << std::fixed << std::setprecision(6) << desc.null_ratio[i] << "\n";
  }
  out << "Sample records:";
  for (const auto& record : desc.sample_records) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (record[i]) {
        row[desc.column_specs[i].name] = *record[i];
      } else {
        row[desc.column_specs[i].name] = nullptr;
      }
    }
    out << "\n" << row.dump();
  }
  return out.str();
}

}  // namespace spio
