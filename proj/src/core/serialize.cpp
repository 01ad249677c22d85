#include "spio/serialize.hpp"

#include "spio/text_util.hpp"

namespace spio {

std::string dump_document(const Document& doc) { return doc.dump(2) + "\n"; }

Document parse_document(std::string_view text) {
  try {
    return Document::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kMalformedJson, e.what());
  }
}

Document load_document(const std::filesystem::path& path) {
  return parse_document(read_file(path));
}

void save_document(const std::filesystem::path& path, const Document& doc) {
  write_file(path, dump_document(doc));
}

void to_json(Document& j, const ColumnSpec& v) {
  j = Document{{"name", v.name}, {"dtype", dtype_name(v.dtype)}};
}
void from_json(const Document& j, ColumnSpec& v) {
  v.name = j.at("name").get<std::string>();
  v.dtype = parse_dtype(j.at("dtype").get<std::string>());
}

namespace {

Cell cell_from_json(const Document& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

}  // namespace

void to_json(Document& j, const DataDescription& v) {
  j = Document::object();
  j["row_count"] = v.row_count;
  j["column_specs"] = v.column_specs;
  j["null_ratio"] = v.null_ratio;
  Document records = Document::array();
  for (const auto& record : v.sample_records) {
    Document row = Document::object();
    for (std::size_t i = 0; i < record.size() && i < v.column_specs.size(); ++i) {
      if (record[i]) {
        row[v.column_specs[i].name] = *record[i];
      } else {
        row[v.column_specs[i].name] = nullptr;
      }
    }
    records.push_back(std::move(row));
  }
  j["sample_records"] = std::move(records);
  j["source_path"] = v.source_path;
}

void from_json(const Document& j, DataDescription& v) {
  v = DataDescription{};
  v.row_count = j.at("row_count").get<std::uint64_t>();
  v.column_specs = j.at("column_specs").get<std::vector<ColumnSpec>>();
  const auto& ratios = j.at("null_ratio");
  if (ratios.is_object()) {
    // Name-keyed form, as emitted by some profilers.
    for (const auto& spec : v.column_specs) v.null_ratio.push_back(ratios.at(spec.name).get<double>());
  } else {
    v.null_ratio = ratios.get<std::vector<double>>();
  }
  for (const auto& row : j.at("sample_records")) {
    if (row.size() != v.column_specs.size()) {
      fail(ErrorCode::kFormatError, "sample record does not match declared columns");
    }
    Record record;
    for (const auto& spec : v.column_specs) record.push_back(cell_from_json(row.at(spec.name)));
    v.sample_records.push_back(std::move(record));
  }
  v.source_path = j.value("source_path", std::string{});
  v.validate();
}

void to_json(Document& j, const TaskDescription& v) {
  j = Document{{"task_kind", task_kind_name(v.task_kind)},
               {"target_column", v.target_column},
               {"metric", metric_name(v.metric)},
               {"background", v.background}};
}
void from_json(const Document& j, TaskDescription& v) {
  v.task_kind = parse_task_kind(j.at("task_kind").get<std::string>());
  v.target_column = j.at("target_column").get<std::string>();
  v.metric = parse_metric(j.at("metric").get<std::string>());
  v.background = j.value("background", std::string{});
}

void to_json(Document& j, const StageArtifact& v) {
  j = Document::object();
  j["stage"] = stage_name(v.stage);
  j["code"] = v.code;
  if (const auto* summary = v.summary()) {
    j["summary"] = *summary;
  } else {
    j["validation_score"] = *v.validation_score();
  }
  j["attempt_count"] = v.attempt_count;
}
void from_json(const Document& j, StageArtifact& v) {
  v.stage = parse_stage(j.at("stage").get<std::string>());
  v.code = j.at("code").get<std::string>();
  if (j.contains("summary")) {
    v.outcome = j.at("summary").get<DataDescription>();
  } else {
    v.outcome = j.at("validation_score").get<double>();
  }
  v.attempt_count = j.at("attempt_count").get<int>();
  v.validate();
}

void to_json(Document& j, const CandidatePlan& v) {
  j = Document{{"stage", stage_name(v.stage)},
               {"ordinal", v.ordinal},
               {"plan_text", v.plan_text},
               {"rationale", v.rationale},
               {"scenario", v.scenario}};
}
void from_json(const Document& j, CandidatePlan& v) {
  v.stage = parse_stage(j.at("stage").get<std::string>());
  v.ordinal = j.at("ordinal").get<int>();
  v.plan_text = j.at("plan_text").get<std::string>();
  v.rationale = j.value("rationale", std::string{});
  v.scenario = j.value("scenario", std::string{});
}

void to_json(Document& j, const PlanRef& v) {
  j = Document{{"stage", stage_name(v.stage)}, {"ordinal", v.ordinal}};
}
void from_json(const Document& j, PlanRef& v) {
  v.stage = parse_stage(j.at("stage").get<std::string>());
  v.ordinal = j.at("ordinal").get<int>();
}

void to_json(Document& j, const PlanLedger& v) {
  j = Document::object();
  j["format_version"] = kFormatVersion;
  j["max_candidates_per_stage"] = v.max_candidates_per_stage;
  Document artifacts = Document::array();
  for (const auto& [_, artifact] : v.artifacts) artifacts.push_back(artifact);
  j["artifacts"] = std::move(artifacts);
  j["candidates"] = v.candidates;
}
void from_json(const Document& j, PlanLedger& v) {
  if (j.at("format_version").get<int>() != kFormatVersion) {
    fail(ErrorCode::kFormatError, "unsupported ledger format_version");
  }
  v = PlanLedger{};
  v.max_candidates_per_stage = j.at("max_candidates_per_stage").get<int>();
  for (const auto& a : j.at("artifacts")) {
    auto artifact = a.get<StageArtifact>();
    const auto stage = artifact.stage;
    v.artifacts.insert_or_assign(stage, std::move(artifact));
  }
  v.candidates = j.at("candidates").get<std::vector<CandidatePlan>>();
}

void to_json(Document& j, const PipelinePath& v) {
  j = Document::object();
  j["rank"] = v.rank;
  Document choice = Document::object();
  for (StageId s : kAllStages) choice[std::string(stage_name(s))] = v.at(s).ordinal;
  j["choice"] = std::move(choice);
  if (v.final_code) {
    j["final_code"] = *v.final_code;
  } else {
    j["final_code"] = nullptr;
  }
}
void from_json(const Document& j, PipelinePath& v) {
  v.rank = j.at("rank").get<int>();
  const auto& choice = j.at("choice");
  for (StageId s : kAllStages) {
    v.choice[stage_index(s)] = PlanRef{s, choice.at(std::string(stage_name(s))).get<int>()};
  }
  const auto& code = j.at("final_code");
  v.final_code = code.is_null() ? std::nullopt : std::optional<std::string>(code.get<std::string>());
}

void to_json(Document& j, const TokenEvent& v) {
  j = Document{{"seq", v.seq},
               {"step_label", v.step_label},
               {"input_tokens", v.input_tokens},
               {"output_tokens", v.output_tokens}};
}
void from_json(const Document& j, TokenEvent& v) {
  v.seq = j.at("seq").get<std::uint64_t>();
  v.step_label = j.at("step_label").get<std::string>();
  v.input_tokens = j.at("input_tokens").get<std::uint64_t>();
  v.output_tokens = j.at("output_tokens").get<std::uint64_t>();
}

void to_json(Document& j, const AttemptLog& v) {
  j = Document::object();
  j["seq"] = v.seq;
  j["stage"] = stage_name(v.stage);
  if (v.path_rank) {
    j["path_rank"] = *v.path_rank;
  } else {
    j["path_rank"] = nullptr;
  }
  j["attempt"] = v.attempt;
  j["status"] = attempt_status_name(v.status);
  j["detail"] = v.detail;
}
void from_json(const Document& j, AttemptLog& v) {
  v.seq = j.at("seq").get<std::uint64_t>();
  v.stage = parse_stage(j.at("stage").get<std::string>());
  const auto& rank = j.at("path_rank");
  v.path_rank = rank.is_null() ? std::nullopt : std::optional<int>(rank.get<int>());
  v.attempt = j.at("attempt").get<int>();
  v.status = parse_attempt_status(j.at("status").get<std::string>());
  v.detail = j.value("detail", std::string{});
}

void to_json(Document& j, const RunLedger& v) {
  j = Document::object();
  j["format_version"] = kFormatVersion;
  j["token_events"] = v.token_events();
  j["attempt_logs"] = v.attempt_logs();
}
void from_json(const Document& j, RunLedger& v) {
  if (j.at("format_version").get<int>() != kFormatVersion) {
    fail(ErrorCode::kFormatError, "unsupported run ledger format_version");
  }
  v = RunLedger::restore(j.at("token_events").get<std::vector<TokenEvent>>(),
                         j.at("attempt_logs").get<std::vector<AttemptLog>>());
}

}  // namespace spio
