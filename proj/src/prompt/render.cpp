#include <sstream>

#include "spio/error.hpp"
#include "spio/prompts.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

void render_into(std::string& out, std::string_view tmpl,
                 const std::map<std::string, std::string>& slots,
                 const std::set<std::string>& sections) {
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find(kOpen, pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return;
    }
    out.append(tmpl.substr(pos, open - pos));
    const auto close = tmpl.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) {
      fail(ErrorCode::kFormatError, "unterminated tag in template");
    }
    const auto tag = tmpl.substr(open + kOpen.size(), close - open - kOpen.size());
    pos = close + kClose.size();

    if (!tag.empty() && tag.front() == '#') {
      const std::string name(tag.substr(1));
      const std::string end_tag = "{{/" + name + "}}";
      const auto end = tmpl.find(end_tag, pos);
      if (end == std::string_view::npos) {
        fail(ErrorCode::kFormatError, "section '" + name + "' is not closed");
      }
      if (sections.contains(name)) render_into(out, tmpl.substr(pos, end - pos), slots, sections);
      pos = end + end_tag.size();
    } else if (!tag.empty() && tag.front() == '/') {
      fail(ErrorCode::kFormatError, "stray closing tag '" + std::string(tag) + "'");
    } else {
      const auto it = slots.find(std::string(tag));
      if (it == slots.end()) fail(ErrorCode::kMissingSlot, std::string(tag));
      out.append(it->second);
    }
  }
}

std::string stage_code_label(StageId stage) { return std::string(stage_title(stage)) + " Code"; }

const std::string& require(const std::string& value, std::string_view slot) {
  if (trim(value).empty()) fail(ErrorCode::kMissingSlot, std::string(slot));
  return value;
}

const std::string& require(const std::optional<std::string>& value, std::string_view slot) {
  if (!value || trim(*value).empty()) fail(ErrorCode::kMissingSlot, std::string(slot));
  return *value;
}

void check_selection(const SelectionContext& ctx) {
  for (StageId s : kAllStages) {
    if (ctx.plans[stage_index(s)].empty()) fail(ErrorCode::kEmptyStagePlans, std::string(stage_name(s)));
  }
}

std::map<std::string, std::string> selection_slots(const SelectionContext& ctx) {
  return {
      {"data", require(ctx.data_summary, "data")},
      {"task", require(ctx.task_text, "task")},
      {"preprocess_plan", render_plan_list(ctx.plans[0])},
      {"feature_engineer_plan", render_plan_list(ctx.plans[1])},
      {"model_select_plan", render_plan_list(ctx.plans[2])},
      {"hyper_opt_plan", render_plan_list(ctx.plans[3])},
  };
}

}  // namespace

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& slots,
                            const std::set<std::string>& sections) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  render_into(out, tmpl, slots, sections);
  return out;
}

std::string_view stage_task_phrase(StageId stage) {
  switch (stage) {
    case StageId::kPreprocess: return "data preprocessing";
    case StageId::kFeatureEngineering: return "feature engineering";
    case StageId::kModelSelection: return "model selection";
    case StageId::kHyperparameterTuning: return "hyperparameter tuning";
  }
  return "";
}

std::string render_codegen(StageId stage, const PromptContext& ctx) {
  std::map<std::string, std::string> slots{
      {"stage_task", std::string(stage_task_phrase(stage))},
      {"task", require(ctx.task_text, "task")},
      {"train_input_path", require(ctx.io_paths.train_input, "train_input_path")},
      {"test_input_path", require(ctx.io_paths.test_input, "test_input_path")},
      {"data", require(ctx.data_summary, "data")},
  };
  std::set<std::string> sections;

  if (!stage_has_score(stage)) {
    sections.insert("output_files");
    slots["train_output_path"] = require(ctx.io_paths.train_output, "train_output_path");
    slots["test_output_path"] = require(ctx.io_paths.test_output, "test_output_path");
  } else {
    sections.insert("score_sentinel");
  }

  if (stage == StageId::kPreprocess) {
    slots["code"] = ctx.prior_code && !trim(*ctx.prior_code).empty() ? *ctx.prior_code : "None";
  } else {
    slots["code"] = require(ctx.prior_code, "code");
  }

  if (ctx.stage_summary || ctx.prior_score) {
    std::string stage_data = ctx.stage_summary.value_or("");
    if (ctx.prior_score) {
      if (!stage_data.empty()) stage_data += "\n";
      stage_data += "Validation Score: " + format_double(*ctx.prior_score);
    }
    sections.insert("stage_data");
    slots["stage_data"] = std::move(stage_data);
  }
  if (ctx.repair_context) {
    sections.insert("repair");
    slots["repair"] = *ctx.repair_context;
  }
  return render_template(template_text(TemplateId::kCodegen), slots, sections);
}

std::string render_planning(StageId stage, const PromptContext& ctx) {
  if (ctx.max_candidates < 1) fail(ErrorCode::kInvalidArgument, "max_candidates must be >= 1");
  std::map<std::string, std::string> slots{
      {"stage_task", std::string(stage_task_phrase(stage))},
      {"n_words", number_word(ctx.max_candidates)},
      {"method_noun", ctx.max_candidates == 1 ? "method" : "methods"},
      {"code_label", stage_code_label(stage)},
      {"code", require(ctx.prior_code, "code")},
      {"data", require(ctx.data_summary, "data")},
      {"task", require(ctx.task_text, "task")},
  };
  if (stage_has_score(stage)) {
    if (!ctx.prior_score) fail(ErrorCode::kMissingSlot, "data_result");
    slots["data_result"] = "Validation Score: " + format_double(*ctx.prior_score);
  } else {
    slots["data_result"] = require(ctx.stage_summary, "data_result");
  }
  std::set<std::string> sections;
  if (!trim(ctx.plan_ledger_view).empty()) {
    sections.insert("prior_plans");
    slots["prior_plans"] = ctx.plan_ledger_view;
  }
  return render_template(template_text(TemplateId::kPlanning), slots, sections);
}

std::string render_plan_list(const std::vector<CandidatePlan>& plans) {
  std::ostringstream out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    if (i > 0) out << "\n";
    out << "Plan " << p.ordinal << ": " << p.plan_text;
    if (!p.scenario.empty()) out << "\n  Scenario: " << p.scenario;
    if (!p.rationale.empty()) out << "\n  Rationale: " << p.rationale;
  }
  return out.str();
}

SelectionContext selection_context(const PlanLedger& ledger, std::string task_text,
                                   std::string data_summary) {
  SelectionContext ctx;
  ctx.task_text = std::move(task_text);
  ctx.data_summary = std::move(data_summary);
  for (StageId s : kAllStages) ctx.plans[stage_index(s)] = ledger.plans_for(s);
  return ctx;
}

std::string render_select_single(const SelectionContext& ctx) {
  check_selection(ctx);
  return render_template(template_text(TemplateId::kSelectSingle), selection_slots(ctx));
}

std::string render_select_topk(const SelectionContext& ctx, int k) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  check_selection(ctx);
  auto slots = selection_slots(ctx);
  slots["k_words"] = number_word(k);
  slots["pipeline_noun"] = k == 1 ? "pipeline" : "pipelines";
  return render_template(template_text(TemplateId::kSelectTopK), slots);
}

std::string render_final_codegen(const FinalCodegenContext& ctx) {
  std::map<std::string, std::string> slots{
      {"task", require(ctx.task_text, "task")},
      {"data", require(ctx.data_summary, "data")},
      {"target", ctx.task.target_column},
      {"train_input_path", require(ctx.train_input, "train_input_path")},
      {"test_input_path", require(ctx.test_input, "test_input_path")},
      {"predictions_output_path", require(ctx.predictions_output, "predictions_output_path")},
  };
  for (StageId s : kAllStages) {
    const std::string slot = std::string(stage_name(s)) + "_plan";
    slots[slot] = require(ctx.plan_texts[stage_index(s)], slot);
  }
  std::set<std::string> sections{is_classification(ctx.task.task_kind) ? "classification" : "regression"};
  if (ctx.repair_context) {
    sections.insert("repair");
    slots["repair"] = *ctx.repair_context;
  }
  return render_template(template_text(TemplateId::kFinalCodegen), slots, sections);
}

}  // namespace spio
