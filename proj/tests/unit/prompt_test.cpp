#include <cstdlib>

#include <gtest/gtest.h>

#include "golden_contexts.hpp"
#include "spio/error.hpp"
#include "spio/parsers.hpp"
#include "spio/prompts.hpp"
#include "spio/serialize.hpp"
#include "spio/text_util.hpp"
#include "test_support.hpp"

namespace spio {
namespace {

using testing::golden_codegen_context;
using testing::golden_planning_context;

using testing::code_of;
using testing::message_of;

bool contains(const std::string& text, std::string_view needle) { return text.find(needle) != std::string::npos; }

// Set SPIO_UPDATE_GOLDENS=1 to rewrite the files after an intended change.
TEST(PromptGolden, RendersMatchGoldenFiles) {
  const bool update = std::getenv("SPIO_UPDATE_GOLDENS") != nullptr;
  for (const auto& [name, text] : testing::golden_renders()) {
    const auto path = testing::golden_path(name);
    if (update) write_file(path, text);
    ASSERT_TRUE(std::filesystem::exists(path)) << name;
    EXPECT_EQ(read_file(path), text) << name;
  }
}

TEST(PromptGolden, RenderingIsRepeatable) {
  EXPECT_EQ(testing::golden_renders(), testing::golden_renders());
}

TEST(PromptGolden, RendersUseLfOnly) {
  for (const auto& [name, text] : testing::golden_renders()) EXPECT_FALSE(contains(text, "\r")) << name;
}

TEST(Codegen, CarriesTheTemplateInstructionsVerbatim) {
  const auto text = render_codegen(StageId::kPreprocess, golden_codegen_context(StageId::kPreprocess));
  for (std::string_view line :
       {"Your task is to perform: data preprocessing.",
        "Focus solely on data preprocessing. Performing any unrelated task is strictly prohibited.",
        "Generate a simple and executable code for data preprocessing, including explanations of the data and task.",
        "Never drop any rows with missing values in the test data. The length of the test set must remain unchanged.",
        "Your final output should save the preprocessed data as CSV files.", "Train data file path: data/train.csv",
        "Test data file path: data/test.csv", "Train data output path: work/stage_1/train.csv",
        "Test data output path: work/stage_1/test.csv", "Summarized Original Data:",
        "Previous Code (excluding preprocessing):"}) {
    EXPECT_TRUE(contains(text, line)) << line;
  }
}

TEST(Codegen, ScoringStageOmitsOutputBlockAndAsksForSentinel) {
  const auto text = render_codegen(StageId::kModelSelection, golden_codegen_context(StageId::kModelSelection));
  EXPECT_FALSE(contains(text, "Output files"));
  EXPECT_FALSE(contains(text, "output path"));
  EXPECT_TRUE(contains(text, "VALIDATION_SCORE: <float>"));
  EXPECT_TRUE(contains(text, "The length of the test set must remain unchanged"));
}

TEST(Codegen, MissingTaskNamesTheSlot) {
  auto ctx = golden_codegen_context(StageId::kPreprocess);
  ctx.task_text.clear();
  EXPECT_EQ(code_of([&] { render_codegen(StageId::kPreprocess, ctx); }), ErrorCode::kMissingSlot);
  EXPECT_TRUE(contains(message_of([&] { render_codegen(StageId::kPreprocess, ctx); }), "task"));
}

TEST(Codegen, LaterStageWithoutPriorCodeIsMissingSlot) {
  auto ctx = golden_codegen_context(StageId::kFeatureEngineering);
  ctx.prior_code.reset();
  EXPECT_TRUE(contains(message_of([&] { render_codegen(StageId::kFeatureEngineering, ctx); }), "code"));
}

TEST(Codegen, RepairNoteIsAppended) {
  auto ctx = golden_codegen_context(StageId::kPreprocess);
  ctx.repair_context = "Previous attempt failed: script exited with code 1";
  const auto text = render_codegen(StageId::kPreprocess, ctx);
  EXPECT_TRUE(contains(text, "\nPrevious attempt failed: script exited with code 1\n"));
}

TEST(Planning, EmbedsPriorCodeAndSummary) {
  const auto ctx = golden_planning_context(StageId::kFeatureEngineering);
  const auto text = render_planning(StageId::kFeatureEngineering, ctx);
  EXPECT_TRUE(contains(text, *ctx.prior_code));
  EXPECT_TRUE(contains(text, *ctx.stage_summary));
  EXPECT_TRUE(contains(text, "Propose up to two alternative methods (plans) to achieve the task."));
  EXPECT_TRUE(contains(text, "Identify and recommend the best solution based on the provided context."));
  EXPECT_TRUE(contains(text, "Previously Generated Plans:"));
}

TEST(Planning, ScoringStagePutsScoreInSummarySlot) {
  const auto text =
      render_planning(StageId::kHyperparameterTuning, golden_planning_context(StageId::kHyperparameterTuning));
  EXPECT_TRUE(contains(text, "Summarized Data:\nValidation Score: 0.8212\n"));
}

TEST(Planning, FirstStageHasNoPriorPlansSection) {
  const auto text = render_planning(StageId::kPreprocess, golden_planning_context(StageId::kPreprocess));
  EXPECT_FALSE(contains(text, "Previously Generated Plans"));
}

TEST(Planning, EmptyPriorCodeIsMissingSlot) {
  auto ctx = golden_planning_context(StageId::kFeatureEngineering);
  ctx.prior_code = "";
  EXPECT_TRUE(contains(message_of([&] { render_planning(StageId::kFeatureEngineering, ctx); }), "code"));
}

TEST(Planning, WordingFollowsN) {
  auto ctx = golden_planning_context(StageId::kPreprocess);
  ctx.max_candidates = 3;
  EXPECT_TRUE(contains(render_planning(StageId::kPreprocess, ctx), "Propose up to three alternative methods"));
  ctx.max_candidates = 1;
  EXPECT_TRUE(contains(render_planning(StageId::kPreprocess, ctx), "Propose up to one alternative method (plans)"));
}

TEST(SelectSingle, ListsEveryPlanVerbatim) {
  const auto sel = selection_context(testing::golden_ledger(), "task", "data");
  const auto text = render_select_single(sel);
  for (const auto& stage : testing::plan_texts()) {
    for (const auto& plan : stage) EXPECT_TRUE(contains(text, plan)) << plan;
  }
  EXPECT_TRUE(contains(text, "Select one best plan from each of the following: preprocessing, feature engineering, "
                             "model selection, and hyperparameter tuning."));
  EXPECT_TRUE(contains(text, "each model should have equal weighting"));
}

TEST(SelectSingle, OnePlanPerStageRendersWithoutPadding) {
  auto sel = selection_context(testing::golden_ledger(), "task", "data");
  for (auto& plans : sel.plans) plans.resize(1);
  const auto text = render_select_single(sel);
  EXPECT_FALSE(contains(text, "Plan 2:"));
}

TEST(SelectSingle, EmptyStageIsNamed) {
  auto sel = selection_context(testing::golden_ledger(), "task", "data");
  sel.plans[stage_index(StageId::kModelSelection)].clear();
  EXPECT_EQ(code_of([&] { render_select_single(sel); }), ErrorCode::kEmptyStagePlans);
  EXPECT_TRUE(contains(message_of([&] { render_select_single(sel); }), "model_selection"));
}

TEST(SelectTopK, WordingAndSchemaBlock) {
  const auto sel = selection_context(testing::golden_ledger(), "task", "data");
  const auto two = render_select_topk(sel, 2);
  EXPECT_TRUE(contains(two, "Select the top two pipelines by combining one plan from each module"));
  EXPECT_TRUE(contains(two, "\"rank\": \"top1\""));
  EXPECT_TRUE(contains(two, "Ensure that the output is valid JSON that can be parsed using json.load()."));
  const auto one = render_select_topk(sel, 1);
  EXPECT_TRUE(contains(one, "Select the top one pipeline by combining"));
  const auto schema = [](const std::string& t) { return t.substr(t.find("Example Output Format:")); };
  EXPECT_EQ(schema(one), schema(two));
  EXPECT_EQ(code_of([&] { render_select_topk(sel, 0); }), ErrorCode::kInvalidArgument);
}

// ---- parsers

TEST(ExtractCode, FirstFencedBlockWins) {
  EXPECT_EQ(extract_code("intro\n```python\nx = 1\n```\nmore\n```\ny = 2\n```\n"), "x = 1\n");
  EXPECT_EQ(extract_code("```\nimport os\n```"), "import os\n");
}

TEST(ExtractCode, BareCodeAcceptedProseRejected) {
  EXPECT_EQ(extract_code("import pandas as pd\ndf = pd.DataFrame()\n"), "import pandas as pd\ndf = pd.DataFrame()\n");
  EXPECT_EQ(code_of([] { extract_code("I would impute the missing ages and then fit a forest."); }),
            ErrorCode::kNoCodeFound);
}

TEST(ExtractPlans, FieldsArePopulated) {
  const auto set = extract_plans(testing::plan_reply(StageId::kPreprocess), 2);
  ASSERT_EQ(set.plans.size(), 2u);
  // Hand-extracted from the fixture text.
  EXPECT_EQ(set.plans[0], (ParsedPlan{testing::plan_texts()[0][0], "The median is robust and the test length is unchanged.",
                                      "Few missing values in a single numeric column."}));
  EXPECT_EQ(set.plans[1].plan_text, testing::plan_texts()[0][1]);
  EXPECT_EQ(set.plans[1].rationale, "It keeps the signal carried by missingness.");
  EXPECT_EQ(set.recommended_index, 1);
}

TEST(ExtractPlans, TruncatesToN) {
  const std::string text = "Plan 1: alpha\nPlan 2: beta\nPlan 3: gamma\n";
  const auto set = extract_plans(text, 2);
  ASSERT_EQ(set.plans.size(), 2u);
  EXPECT_EQ(set.plans[1].plan_text, "beta");
}

TEST(ExtractPlans, NumberedListFallback) {
  const auto set = extract_plans("Options:\n1. Use the median.\n2) Use the mean.\n", 5);
  ASSERT_EQ(set.plans.size(), 2u);
  EXPECT_EQ(set.plans[0].plan_text, "Use the median.");
  EXPECT_EQ(set.plans[1].plan_text, "Use the mean.");
}

TEST(ExtractPlans, ProseHasNoPlans) {
  EXPECT_EQ(code_of([] { extract_plans("Just impute things sensibly and move on.", 2); }), ErrorCode::kNoPlansFound);
}

TEST(ExtractPlans, NeverMoreThanN) {
  std::string text;
  for (int i = 1; i <= 9; ++i) text += "Method " + std::to_string(i) + ": option " + std::to_string(i) + "\n";
  for (int n = 1; n <= 10; ++n) EXPECT_LE(extract_plans(text, n).plans.size(), static_cast<std::size_t>(n));
}

using testing::topk_example_output;

TEST(ParseTopK, ExampleOutputFormatParses) {
  const auto sel = parse_topk(topk_example_output(), 2);
  ASSERT_EQ(sel.entries.size(), 2u);
  EXPECT_EQ(sel.entries[0].rank_label, "top1");
  EXPECT_EQ(sel.entries[1].rank_label, "top2");
  for (const auto& e : sel.entries) {
    for (const auto& f : e.fields) EXPECT_EQ(f, "...");
  }
}

TEST(ParseTopK, RoundTripsThroughSerialize) {
  const auto sel = parse_topk(topk_example_output(), 2);
  EXPECT_EQ(parse_topk(serialize_topk(sel), 2), sel);
  const auto fixture = parse_topk(testing::topk_reply({{1, 2, 1, 2}, {2, 1, 2, 1}}), 2);
  EXPECT_EQ(parse_topk(serialize_topk(fixture), 2), fixture);
}

TEST(ParseTopK, EachSingleFieldDeletionIsNamed) {
  const Document doc = Document::parse(topk_example_output());
  std::vector<std::vector<std::string>> deletions = {{"rank"}, {"best_combine"}};
  for (auto key : kTopKFields) deletions.push_back({"best_combine", std::string(key)});
  for (const auto& del : deletions) {
    for (std::size_t entry = 0; entry < 2; ++entry) {
      Document broken = doc;
      if (del.size() == 1) {
        broken[entry].erase(del[0]);
      } else {
        broken[entry][del[0]].erase(del[1]);
      }
      const std::string text = broken.dump(2);
      EXPECT_EQ(code_of([&] { parse_topk(text, 2); }), ErrorCode::kSchemaViolation) << del.back();
      EXPECT_TRUE(contains(message_of([&] { parse_topk(text, 2); }), del.back())) << del.back();
    }
  }
}

TEST(ParseTopK, FirstKEntriesOnly) {
  const auto sel = parse_topk(testing::topk_reply({{1, 1, 1, 1}, {2, 2, 2, 2}, {1, 2, 1, 2}}), 2);
  ASSERT_EQ(sel.entries.size(), 2u);
  EXPECT_EQ(sel.entries[1].rank_label, "top2");
}

TEST(ParseTopK, OneObjectPerLine) {
  const std::string text =
      R"({"rank": "top1", "best_combine": {"preprocess": "a", "feature_engineering": "b", "model_selection": "c", "optimal_hyper_tool": "d"}})"
      "\n"
      R"({"rank": "top2", "best_combine": {"preprocess": "e", "feature_engineering": "f", "model_selection": "g", "optimal_hyper_tool": "h"}})";
  const auto sel = parse_topk(text, 5);
  ASSERT_EQ(sel.entries.size(), 2u);
  EXPECT_EQ(sel.entries[1].fields[3], "h");
}

TEST(ParseTopK, Errors) {
  EXPECT_EQ(code_of([] { parse_topk("[{\"rank\": ", 2); }), ErrorCode::kMalformedJson);
  EXPECT_EQ(code_of([] { parse_topk("[]", 2); }), ErrorCode::kEmptySelection);
  const auto dup = testing::topk_reply({{1, 1, 1, 1}, {2, 2, 2, 2}});
  std::string text = dup;
  text.replace(text.find("top2"), 4, "top1");
  EXPECT_EQ(code_of([&] { parse_topk(text, 2); }), ErrorCode::kSchemaViolation);
  std::string empty_field = dup;
  empty_field.replace(empty_field.find(testing::plan_texts()[2][0]), testing::plan_texts()[2][0].size(), "");
  EXPECT_TRUE(contains(message_of([&] { parse_topk(empty_field, 2); }), "model_selection"));
}

TEST(ParseSingleChoice, LinesAndJson) {
  const auto lines = parse_single_choice(testing::single_reply({2, 1, 2, 1}));
  EXPECT_EQ(lines[0], testing::plan_texts()[0][1]);
  EXPECT_EQ(lines[3], testing::plan_texts()[3][0]);
  const auto json = parse_single_choice(
      R"({"preprocess": "p", "feature_engineering": "f", "model_selection": "m", "optimal_hyper_tool": "h"})");
  EXPECT_EQ(json, (std::array<std::string, 4>{"p", "f", "m", "h"}));
  EXPECT_EQ(code_of([] { parse_single_choice("Preprocessing: a\nModel Selection: b\n"); }), ErrorCode::kSchemaViolation);
}

TEST(Template, MissingSlotAndSections) {
  EXPECT_EQ(render_template("a {{x}} b", {{"x", "1"}}), "a 1 b");
  EXPECT_EQ(render_template("{{#s}}on{{/s}}|", {}, {"s"}), "on|");
  EXPECT_EQ(render_template("{{#s}}on{{/s}}|", {}), "|");
  EXPECT_TRUE(contains(message_of([] { render_template("{{y}}", {}); }), "y"));
}

}  // namespace
}  // namespace spio
