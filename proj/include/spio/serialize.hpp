#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "spio/error.hpp"
#include "spio/types.hpp"

namespace spio {

// All persisted documents use insertion-ordered JSON, two-space indent, LF
// line endings and a trailing newline, so equal values give equal bytes.
using Document = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

std::string dump_document(const Document& doc);
Document parse_document(std::string_view text);  // throws kMalformedJson
Document load_document(const std::filesystem::path& path);
void save_document(const std::filesystem::path& path, const Document& doc);

void to_json(Document& j, const ColumnSpec& v);
void from_json(const Document& j, ColumnSpec& v);
void to_json(Document& j, const DataDescription& v);
void from_json(const Document& j, DataDescription& v);
void to_json(Document& j, const TaskDescription& v);
void from_json(const Document& j, TaskDescription& v);
void to_json(Document& j, const StageArtifact& v);
void from_json(const Document& j, StageArtifact& v);
void to_json(Document& j, const CandidatePlan& v);
void from_json(const Document& j, CandidatePlan& v);
void to_json(Document& j, const PlanRef& v);
void from_json(const Document& j, PlanRef& v);
void to_json(Document& j, const PlanLedger& v);
void from_json(const Document& j, PlanLedger& v);
void to_json(Document& j, const PipelinePath& v);
void from_json(const Document& j, PipelinePath& v);
void to_json(Document& j, const TokenEvent& v);
void from_json(const Document& j, TokenEvent& v);
void to_json(Document& j, const AttemptLog& v);
void from_json(const Document& j, AttemptLog& v);
void to_json(Document& j, const RunLedger& v);
void from_json(const Document& j, RunLedger& v);

// Typed decode that reports schema problems as kFormatError.
template <typename T>
T decode(const Document& j) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("FormatError: ") + e.what());
  }
}

}  // namespace spio
