#include <regex>
#include <set>

#include <json.hpp>

#include "spio/error.hpp"
#include "spio/parsers.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

struct FencedBlock {
  std::string body;
  bool found = false;
};

FencedBlock first_fenced_block(std::string_view text) {
  FencedBlock block;
  bool inside = false;
  std::string body;
  for (auto line : split_lines(text)) {
    const auto t = trim(line);
    if (t.starts_with("```")) {
      if (inside) {
        block.body = std::move(body);
        block.found = true;
        return block;
      }
      inside = true;
      continue;
    }
    if (inside) {
      body.append(line);
      body.push_back('\n');
    }
  }
  if (inside) {
    // unclosed fence: take everything after it
    block.body = std::move(body);
    block.found = true;
  }
  return block;
}

bool looks_like_code(std::string_view text) {
  static const std::regex kImport(R"(^\s*(import\s+[A-Za-z_]|from\s+[\w\.]+\s+import\s))");
  static const std::regex kAssign(R"(^\s*[A-Za-z_][\w\.]*(\[[^\]]*\])*\s*(=|\+=|-=|\*=|/=)[^=])");
  for (auto line : split_lines(text)) {
    const std::string l(line);
    if (std::regex_search(l, kImport) || std::regex_search(l, kAssign)) return true;
  }
  return false;
}

// Strips markdown emphasis, heading hashes and a leading bullet.
std::string clean_line(std::string_view line) {
  std::string s(trim(line));
  for (const std::string_view marker : {"**", "__"}) {
    for (auto pos = s.find(marker); pos != std::string::npos; pos = s.find(marker)) {
      s.erase(pos, marker.size());
    }
  }
  std::string_view v = s;
  while (!v.empty() && v.front() == '#') v.remove_prefix(1);
  v = trim(v);
  if (v.size() >= 2 && (v[0] == '-' || v[0] == '*') && v[1] == ' ') v.remove_prefix(2);
  if (v.starts_with("\xE2\x80\xA2")) v.remove_prefix(3);  // bullet glyph
  return std::string(trim(v));
}

std::string join(std::string current, std::string_view more) {
  more = trim(more);
  if (more.empty()) return current;
  if (!current.empty()) current.push_back(' ');
  current.append(more);
  return current;
}

}  // namespace

std::string extract_code(std::string_view llm_text) {
  const auto block = first_fenced_block(llm_text);
  if (block.found) {
    if (trim(block.body).empty()) fail(ErrorCode::kNoCodeFound, "fenced block is empty");
    return block.body;
  }
  if (looks_like_code(llm_text)) return std::string(llm_text);
  fail(ErrorCode::kNoCodeFound, "response contains no code block");
}

ParsedPlanSet extract_plans(std::string_view llm_text, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  static const std::regex kHeader(R"(^(method|plan|option)\s*#?\s*(\d+)\s*[:.)\-]?\s*(.*)$)",
                                  std::regex::icase);
  static const std::regex kNumbered(R"(^(\d+)[.)]\s+(.*)$)");
  static const std::regex kScenario(
      R"(^(scenario|suitable scenario|best scenario|when to use|in which scenario[^:]*)\s*:\s*(.*)$)",
      std::regex::icase);
  static const std::regex kRationale(R"(^(rationale|reason|why[^:]*)\s*:\s*(.*)$)", std::regex::icase);
  static const std::regex kRecommend(R"(^(recommended|recommendation|best solution|i recommend)\b(.*)$)",
                                     std::regex::icase);
  static const std::regex kIndex(R"((\d+))");

  const auto lines = split_lines(llm_text);
  bool header_mode = false;
  for (auto line : lines) {
    if (std::regex_match(clean_line(line), kHeader)) {
      header_mode = true;
      break;
    }
  }

  ParsedPlanSet result;
  enum class Field { kNone, kPlan, kScenario, kRationale } field = Field::kNone;
  std::optional<int> recommended;

  for (auto raw : lines) {
    const std::string line = clean_line(raw);
    if (line.empty()) continue;
    std::smatch m;

    if (std::regex_match(line, m, kRecommend)) {
      const std::string rest = m[2].str();
      std::smatch idx;
      if (std::regex_search(rest, idx, kIndex)) recommended = std::stoi(idx[1].str());
      field = Field::kNone;
      continue;
    }

    bool starts_plan = false;
    std::string head;
    if (header_mode) {
      if (std::regex_match(line, m, kHeader)) {
        starts_plan = true;
        head = m[3].str();
      }
    } else {
      const bool top_level = !raw.empty() && !std::isspace(static_cast<unsigned char>(raw.front()));
      if (top_level && std::regex_match(line, m, kNumbered)) {
        starts_plan = true;
        head = m[2].str();
      }
    }
    if (starts_plan) {
      result.plans.push_back(ParsedPlan{std::string(trim(head)), {}, {}});
      field = Field::kPlan;
      continue;
    }
    if (result.plans.empty()) continue;
    auto& plan = result.plans.back();
    if (std::regex_match(line, m, kScenario)) {
      plan.scenario = join(std::move(plan.scenario), m[2].str());
      field = Field::kScenario;
    } else if (std::regex_match(line, m, kRationale)) {
      plan.rationale = join(std::move(plan.rationale), m[2].str());
      field = Field::kRationale;
    } else if (field == Field::kPlan) {
      plan.plan_text = join(std::move(plan.plan_text), line);
    } else if (field == Field::kScenario) {
      plan.scenario = join(std::move(plan.scenario), line);
    } else if (field == Field::kRationale) {
      plan.rationale = join(std::move(plan.rationale), line);
    }
  }

  std::erase_if(result.plans, [](const ParsedPlan& p) { return p.plan_text.empty(); });
  if (result.plans.empty()) fail(ErrorCode::kNoPlansFound, "no enumerated methods in response");
  if (static_cast<int>(result.plans.size()) > n) result.plans.resize(static_cast<std::size_t>(n));
  if (recommended && *recommended >= 1 && *recommended <= static_cast<int>(result.plans.size())) {
    result.recommended_index = recommended;
  }
  return result;
}

TopKSelection parse_topk(std::string_view llm_text, int k) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto block = first_fenced_block(llm_text);
  const std::string body(trim(block.found ? std::string_view(block.body) : llm_text));

  nlohmann::json items = nlohmann::json::array();
  try {
    auto doc = nlohmann::json::parse(body);
    if (doc.is_array()) {
      items = std::move(doc);
    } else if (doc.is_object()) {
      items.push_back(std::move(doc));
    } else {
      fail(ErrorCode::kSchemaViolation, "expected a list of objects");
    }
  } catch (const nlohmann::json::parse_error& whole_error) {
    // JSON Lines: one object per non-empty line.
    try {
      for (auto line : split_lines(body)) {
        if (trim(line).empty()) continue;
        items.push_back(nlohmann::json::parse(line));
      }
    } catch (const nlohmann::json::parse_error&) {
      fail(ErrorCode::kMalformedJson, whole_error.what());
    }
  }
  if (items.empty()) fail(ErrorCode::kEmptySelection, "selection list is empty");

  TopKSelection selection;
  std::set<std::string> seen_ranks;
  const std::size_t take = std::min(items.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < take; ++i) {
    const auto& item = items[i];
    if (!item.is_object()) fail(ErrorCode::kSchemaViolation, "entry " + std::to_string(i) + " is not an object");
    TopKEntry entry;
    const auto rank = item.find("rank");
    if (rank == item.end() || !(rank->is_string() || rank->is_number())) {
      fail(ErrorCode::kSchemaViolation, "rank");
    }
    entry.rank_label = rank->is_string() ? rank->get<std::string>() : rank->dump();
    if (trim(entry.rank_label).empty()) fail(ErrorCode::kSchemaViolation, "rank");
    if (!seen_ranks.insert(entry.rank_label).second) {
      fail(ErrorCode::kSchemaViolation, "rank (duplicate label '" + entry.rank_label + "')");
    }
    const auto combine = item.find("best_combine");
    if (combine == item.end() || !combine->is_object()) fail(ErrorCode::kSchemaViolation, "best_combine");
    for (std::size_t f = 0; f < kTopKFields.size(); ++f) {
      const auto key = std::string(kTopKFields[f]);
      const auto value = combine->find(key);
      if (value == combine->end() || !value->is_string() || trim(value->get<std::string>()).empty()) {
        fail(ErrorCode::kSchemaViolation, key);
      }
      entry.fields[f] = value->get<std::string>();
    }
    selection.entries.push_back(std::move(entry));
  }
  return selection;
}

std::string serialize_topk(const TopKSelection& selection) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& entry : selection.entries) {
    nlohmann::ordered_json combine = nlohmann::ordered_json::object();
    for (std::size_t f = 0; f < kTopKFields.size(); ++f) combine[std::string(kTopKFields[f])] = entry.fields[f];
    out.push_back(nlohmann::ordered_json{{"rank", entry.rank_label}, {"best_combine", std::move(combine)}});
  }
  return out.dump(2) + "\n";
}

std::array<std::string, 4> parse_single_choice(std::string_view llm_text) {
  const auto block = first_fenced_block(llm_text);
  const std::string body(trim(block.found ? std::string_view(block.body) : llm_text));

  if (!body.empty() && body.front() == '{') {
    try {
      auto doc = nlohmann::json::parse(body);
      if (doc.contains("best_combine")) doc = doc["best_combine"];
      std::array<std::string, 4> out;
      for (std::size_t f = 0; f < kTopKFields.size(); ++f) {
        const auto key = std::string(kTopKFields[f]);
        if (!doc.contains(key) || !doc[key].is_string()) fail(ErrorCode::kSchemaViolation, key);
        out[f] = doc[key].get<std::string>();
      }
      return out;
    } catch (const nlohmann::json::exception&) {
      // fall through to the line format
    }
  }

  static const std::array<std::regex, 4> kLabels = {
      std::regex(R"(^(preprocessing|preprocess|data preprocessing)( plan)?\s*:\s*(.*)$)", std::regex::icase),
      std::regex(R"(^(feature engineering|feature_engineering)( plan)?\s*:\s*(.*)$)", std::regex::icase),
      std::regex(R"(^(model selection|model_selection)( plan)?\s*:\s*(.*)$)", std::regex::icase),
      std::regex(R"(^(hyperparameter tuning|hyperparameter optimization|optimal_hyper_tool)( plan)?\s*:\s*(.*)$)",
                 std::regex::icase),
  };
  std::array<std::optional<std::string>, 4> found;
  for (auto raw : split_lines(body)) {
    const std::string line = clean_line(raw);
    for (std::size_t s = 0; s < kLabels.size(); ++s) {
      std::smatch m;
      if (!found[s] && std::regex_match(line, m, kLabels[s]) && !trim(m[3].str()).empty()) {
        found[s] = std::string(trim(m[3].str()));
        break;
      }
    }
  }
  std::array<std::string, 4> out;
  for (std::size_t s = 0; s < found.size(); ++s) {
    if (!found[s]) fail(ErrorCode::kSchemaViolation, std::string(kTopKFields[s]));
    out[s] = *found[s];
  }
  return out;
}

}  // namespace spio
