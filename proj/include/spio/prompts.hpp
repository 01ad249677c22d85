#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spio/types.hpp"

namespace spio {

// Minimal template language: `{{name}}` substitutes a slot, and
// `{{#name}}...{{/name}}` keeps its body only when section `name` is enabled.
// A slot that is referenced but not provided raises kMissingSlot(name).
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& slots,
                            const std::set<std::string>& sections = {});

enum class TemplateId { kCodegen, kPlanning, kSelectSingle, kSelectTopK, kFinalCodegen };
std::string_view template_text(TemplateId id);

struct IoPaths {
  std::string train_input;
  std::string test_input;
  std::optional<std::string> train_output;
  std::optional<std::string> test_output;
};

struct PromptContext {
  std::string task_text;     // rendered task description
  std::string data_summary;  // rendered original dataset description
  std::optional<std::string> stage_summary;  // rendered latest stage output
  std::optional<std::string> prior_code;
  std::optional<double> prior_score;
  IoPaths io_paths;
  std::string plan_ledger_view;  // rendered earlier-stage plans, may be empty
  std::optional<std::string> repair_context;
  int max_candidates = 2;
};

// Stage description used in the "perform: ..." slots.
std::string_view stage_task_phrase(StageId stage);

std::string render_codegen(StageId stage, const PromptContext& ctx);
std::string render_planning(StageId stage, const PromptContext& ctx);

// Numbered listing of plans as embedded in prompts.
std::string render_plan_list(const std::vector<CandidatePlan>& plans);

struct SelectionContext {
  std::string task_text;
  std::string data_summary;
  std::array<std::vector<CandidatePlan>, 4> plans;  // indexed by stage_index
};

SelectionContext selection_context(const PlanLedger& ledger, std::string task_text,
                                   std::string data_summary);

std::string render_select_single(const SelectionContext& ctx);
std::string render_select_topk(const SelectionContext& ctx, int k);

struct FinalCodegenContext {
  std::string task_text;
  std::string data_summary;
  TaskDescription task;
  std::array<std::string, 4> plan_texts;  // indexed by stage_index
  std::string train_input;
  std::string test_input;
  std::string predictions_output;
  std::optional<std::string> repair_context;
};

std::string render_final_codegen(const FinalCodegenContext& ctx);

}  // namespace spio
