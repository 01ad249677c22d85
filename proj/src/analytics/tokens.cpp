#include <charconv>
#include <sstream>

#include "spio/analytics.hpp"
#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

constexpr std::string_view kHeader = "step\tinput_tokens\toutput_tokens\ttotal_tokens";

std::uint64_t parse_count(std::string_view field) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    fail(ErrorCode::kFormatError, "bad token count '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<UsageRow> token_breakdown(const RunLedger& run) { return usage_report(run); }

std::string tokens_tsv(const std::vector<UsageRow>& rows) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& r : rows) {
    out << r.step_label << "\t" << r.input_tokens << "\t" << r.output_tokens << "\t" << r.total_tokens << "\n";
  }
  return out.str();
}

std::vector<UsageRow> parse_tokens_tsv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kHeader) fail(ErrorCode::kFormatError, "missing tokens.tsv header");
  std::vector<UsageRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = lines[i];
    for (auto tab = rest.find('\t'); tab != std::string_view::npos; tab = rest.find('\t')) {
      fields.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 4) fail(ErrorCode::kFormatError, "tokens.tsv line " + std::to_string(i + 1) + " needs 4 fields");
    rows.push_back(UsageRow{std::string(fields[0]), parse_count(fields[1]), parse_count(fields[2]),
                            parse_count(fields[3])});
  }
  return rows;
}

}  // namespace spio
