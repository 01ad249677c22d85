#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spio {

// Body of the first ``` fenced block (language tag allowed). Without a fence
// the whole text is returned if it looks like code (an import or assignment
// line); otherwise kNoCodeFound.
std::string extract_code(std::string_view llm_text);

struct ParsedPlan {
  std::string plan_text;
  std::string rationale;
  std::string scenario;
  bool operator==(const ParsedPlan&) const = default;
};

struct ParsedPlanSet {
  std::vector<ParsedPlan> plans;
  std::optional<int> recommended_index;  // 1-based, within `plans`
};

// Plans start at lines headed "Method N", "Plan N" or "Option N"
// (case-insensitive). Without such headers, top-level numbered items
// ("1." / "1)") start plans. "Scenario:" and "Rationale:"/"Why ...:" lines fill
// the matching fields; a "Recommended ..." line names the preferred plan.
// Keeps at most `n` plans; kNoPlansFound when nothing parses.
ParsedPlanSet extract_plans(std::string_view llm_text, int n);

inline constexpr std::array<std::string_view, 4> kTopKFields = {
    "preprocess", "feature_engineering", "model_selection", "optimal_hyper_tool"};

struct TopKEntry {
  std::string rank_label;
  std::array<std::string, 4> fields;  // ordered as kTopKFields
  bool operator==(const TopKEntry&) const = default;
};

struct TopKSelection {
  std::vector<TopKEntry> entries;
  bool operator==(const TopKSelection&) const = default;
};

// Parses `[{"rank": ..., "best_combine": {...}}, ...]`, optionally fenced, or
// one such object per line. Returns the first k entries.
TopKSelection parse_topk(std::string_view llm_text, int k);
std::string serialize_topk(const TopKSelection& selection);

// Per-stage plan texts from a single-path selection reply: lines of the form
// "Preprocessing: <plan>" ... "Hyperparameter Tuning: <plan>", or a JSON
// object keyed like best_combine. Indexed by stage order.
std::array<std::string, 4> parse_single_choice(std::string_view llm_text);

}  // namespace spio
