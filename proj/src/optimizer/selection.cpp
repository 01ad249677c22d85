#include "spio/selection.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "spio/error.hpp"
#include "spio/parsers.hpp"
#include "spio/prompts.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

struct Labelled {
  std::optional<int> ordinal;
  std::string body;
};

Labelled strip_label(std::string_view text) {
  static const std::regex kLabel(R"(^\s*(?:plan|method|option)\s*#?\s*(\d+)\s*[:.)\-]?\s*([\s\S]*)$)",
                                 std::regex::icase);
  static const std::regex kBare(R"(^\s*(\d+)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, kLabel)) return {std::stoi(m[1].str()), std::string(trim(m[2].str()))};
  if (std::regex_match(s, m, kBare)) return {std::stoi(m[1].str()), ""};
  return {std::nullopt, std::string(trim(text))};
}

std::string excerpt(std::string_view text) {
  return text.size() > 160 ? std::string(text.substr(0, 160)) + "..." : std::string(text);
}

[[noreturn]] void unmappable(StageId stage, std::string_view text, const std::vector<CandidatePlan>& plans) {
  std::string msg = std::string(stage_name(stage)) + ": reply '" + excerpt(text) + "' matches no candidate; candidates:";
  for (const auto& p : plans) msg += " [" + std::to_string(p.ordinal) + "] " + excerpt(p.plan_text);
  fail(ErrorCode::kUnmappablePlan, msg);
}

PipelinePath map_fields(const PlanLedger& ledger, const std::array<std::string, 4>& fields, int rank) {
  PipelinePath path;
  path.rank = rank;
  for (StageId s : kAllStages) path.choice[stage_index(s)] = map_plan_text(ledger, s, fields[stage_index(s)]);
  return path;
}

SelectionContext context_for(const PlanLedger& ledger, const CascadeInputs& inputs) {
  return selection_context(ledger, inputs.task.render(), render_summary(inputs.data));
}

}  // namespace

double token_overlap(std::string_view a, std::string_view b) {
  const auto ta = word_tokens(a);
  const auto tb = word_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.contains(t) ? 1 : 0;
  return 2.0 * static_cast<double>(common) / static_cast<double>(sa.size() + sb.size());
}

PlanRef map_plan_text(const PlanLedger& ledger, StageId stage, std::string_view text) {
  const auto plans = ledger.plans_for(stage);
  if (plans.empty()) fail(ErrorCode::kEmptyStagePlans, std::string(stage_name(stage)));
  const Labelled labelled = strip_label(text);
  const auto by_ordinal = [&]() -> std::optional<PlanRef> {
    if (!labelled.ordinal) return std::nullopt;
    for (const auto& p : plans) {
      if (p.ordinal == *labelled.ordinal) return PlanRef{stage, p.ordinal};
    }
    return std::nullopt;
  };
  const std::string needle = normalize_whitespace(labelled.body);
  if (needle.empty()) {
    if (auto ref = by_ordinal()) return *ref;
    unmappable(stage, text, plans);
  }

  std::vector<const CandidatePlan*> contained;
  for (const auto& p : plans) {
    const std::string hay = normalize_whitespace(p.plan_text);
    if (!hay.empty() && (needle.find(hay) != std::string::npos || hay.find(needle) != std::string::npos)) {
      contained.push_back(&p);
    }
  }
  if (contained.size() == 1) return PlanRef{stage, contained.front()->ordinal};

  // Token overlap, restricted to the containment hits when there are several.
  const CandidatePlan* best = nullptr;
  double best_score = -1.0;
  double runner_up = -1.0;
  for (const auto& p : plans) {
    if (contained.size() > 1 && std::find(contained.begin(), contained.end(), &p) == contained.end()) continue;
    const double s = token_overlap(labelled.body, p.plan_text);
    if (s > best_score) {
      runner_up = best_score;
      best_score = s;
      best = &p;
    } else if (s > runner_up) {
      runner_up = s;
    }
  }
  if (best && best_score >= kMatchThreshold && best_score > runner_up) return PlanRef{stage, best->ordinal};
  if (auto ref = by_ordinal()) return *ref;
  unmappable(stage, text, plans);
}

PipelinePath select_single(const PlanLedger& ledger, RunLedger& run, Gateway& gateway,
                           const CascadeInputs& inputs) {
  const auto prompt = render_select_single(context_for(ledger, inputs));
  const auto response = gateway.complete(GenerationRequest{"select_single", prompt}, run);
  return map_fields(ledger, parse_single_choice(response.text), 1);
}

std::vector<PipelinePath> select_topk(const PlanLedger& ledger, RunLedger& run, Gateway& gateway,
                                      const CascadeInputs& inputs, int k) {
  const auto prompt = render_select_topk(context_for(ledger, inputs), k);
  const auto response = gateway.complete(GenerationRequest{"select_topk", prompt}, run);
  const auto selection = parse_topk(response.text, k);
  std::vector<PipelinePath> paths;
  for (const auto& entry : selection.entries) {
    paths.push_back(map_fields(ledger, entry.fields, static_cast<int>(paths.size()) + 1));
  }
  return paths;
}

}  // namespace spio
