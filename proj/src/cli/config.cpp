#include <cstdlib>

#include "spio/cli.hpp"
#include "spio/text_util.hpp"

namespace spio::cli {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::vector<ScriptedFixture> load_fixtures(const Document& list, const fs::path& base) {
  if (!list.is_array()) fail(ErrorCode::kConfigError, "provider fixtures must be a list");
  std::vector<ScriptedFixture> fixtures;
  for (const auto& item : list) {
    ScriptedFixture f;
    if (item.contains("response_file")) {
      f.response_text = read_file(resolve(base, item.at("response_file").get<std::string>()));
    } else {
      f.response_text = item.at("response_text").get<std::string>();
    }
    if (item.contains("expected_prompt_digest")) {
      f.expected_prompt_digest = item.at("expected_prompt_digest").get<std::string>();
    }
    if (item.contains("input_tokens")) f.input_tokens = item.at("input_tokens").get<std::uint64_t>();
    if (item.contains("output_tokens")) f.output_tokens = item.at("output_tokens").get<std::uint64_t>();
    fixtures.push_back(std::move(f));
  }
  return fixtures;
}

ProviderConfig load_provider(const Document& j, const fs::path& base) {
  ProviderConfig p;
  p.kind = parse_provider_kind(j.value("kind", std::string("scripted")));
  p.endpoint = j.value("endpoint", std::string{});
  p.model_name = j.value("model_name", std::string{});
  p.api_key_env = j.value("api_key_env", std::string{});
  p.request_timeout_s = j.value("request_timeout_s", p.request_timeout_s);
  p.max_retries = j.value("max_retries", p.max_retries);
  p.backoff_initial_s = j.value("backoff_initial_s", p.backoff_initial_s);
  if (j.contains("token_budget") && !j.at("token_budget").is_null()) {
    p.token_budget = j.at("token_budget").get<std::uint64_t>();
  }
  if (j.contains("fixtures_path")) {
    const fs::path fixtures_path = resolve(base, j.at("fixtures_path").get<std::string>());
    p.fixtures = load_fixtures(load_document(fixtures_path), fixtures_path.parent_path());
  } else if (j.contains("fixtures")) {
    p.fixtures = load_fixtures(j.at("fixtures"), base);
  }
  return p;
}

AllowSet load_allow_set(const Document& j) {
  AllowSet set;
  for (const auto& m : j.value("modules", std::vector<std::string>{})) set.modules.insert(m);
  for (const auto& m : j.value("members", std::vector<std::string>{})) set.members.insert(m);
  return set;
}

void load_cascade(const Document& j, RunConfig& cfg, const fs::path& base) {
  auto& c = cfg.cascade;
  c.attempt_budget = j.value("attempt_budget", c.attempt_budget);
  c.per_stage_timeout_s = j.value("per_stage_timeout_s", c.per_stage_timeout_s);
  c.sample_size = j.value("sample_size", c.sample_size);
  if (j.contains("whitelist")) {
    for (const auto& [stage, set] : j.at("whitelist").items()) {
      c.whitelist[stage_index(parse_stage(stage))] = load_allow_set(set);
    }
  }
  if (j.contains("runner_command")) {
    cfg.runner_command = j.at("runner_command").get<std::vector<std::string>>();
    // Paths to a runner executable are taken relative to the config file.
    if (!cfg.runner_command.empty() && cfg.runner_command.front().find('/') != std::string::npos) {
      cfg.runner_command.front() = resolve(base, cfg.runner_command.front()).string();
    }
  }
}

void require_file(const fs::path& p, std::string_view what) {
  if (!fs::is_regular_file(p)) fail(ErrorCode::kConfigError, std::string(what) + " not found: " + p.string());
}

}  // namespace

std::string_view mode_name(Mode m) { return m == Mode::kSpioS ? "spio_s" : "spio_e"; }

Mode parse_mode(std::string_view name) {
  if (name == "spio_s") return Mode::kSpioS;
  if (name == "spio_e") return Mode::kSpioE;
  fail(ErrorCode::kConfigError, "unknown mode '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (split) {
    require_file(split->dataset_path, "dataset");
  } else {
    require_file(train_path, "train file");
    require_file(test_path, "test file");
  }
  try {
    task.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfigError, e.what());
  }
  if (k < 1) fail(ErrorCode::kConfigError, "k must be >= 1");
  if (n < 1) fail(ErrorCode::kConfigError, "n must be >= 1");
  if (workers < 1) fail(ErrorCode::kConfigError, "workers must be >= 1");
  if (runner_command.empty()) fail(ErrorCode::kConfigError, "runner_command is empty");
  if (provider.kind == ProviderKind::kHttpChat && provider.endpoint.empty()) {
    fail(ErrorCode::kConfigError, "http_chat provider needs an endpoint");
  }
  if (provider.kind == ProviderKind::kScripted && provider.fixtures.empty()) {
    fail(ErrorCode::kConfigError, "scripted provider has no fixtures");
  }
  if (embedding.kind != "hashing" && embedding.kind != "http") {
    fail(ErrorCode::kConfigError, "unknown embedding kind '" + embedding.kind + "'");
  }
  if (cascade.attempt_budget < 1) fail(ErrorCode::kConfigError, "attempt_budget must be >= 1");
  if (!(cascade.per_stage_timeout_s > 0)) fail(ErrorCode::kConfigError, "per_stage_timeout_s must be positive");
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::kConfigError, "config file not found: " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  RunConfig cfg;
  try {
    const Document j = load_document(path);
    if (j.contains("dataset_path")) {
      SplitConfig split;
      split.dataset_path = resolve(base, j.at("dataset_path").get<std::string>());
      split.scheme.kind = parse_split_kind(j.value("split_scheme", std::string("three_way_70_10_20")));
      cfg.split = std::move(split);
    } else {
      cfg.train_path = resolve(base, j.at("train_path").get<std::string>());
      cfg.test_path = resolve(base, j.at("test_path").get<std::string>());
    }
    cfg.task = decode<TaskDescription>(j.at("task"));
    cfg.mode = parse_mode(j.value("mode", std::string("spio_e")));
    cfg.k = j.value("k", cfg.k);
    cfg.n = j.value("n", cfg.n);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.run_id = j.value("run_id", std::string{});
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("provider")) cfg.provider = load_provider(j.at("provider"), base);
    if (j.contains("cascade")) load_cascade(j.at("cascade"), cfg, base);
    if (j.contains("embedding")) {
      const auto& e = j.at("embedding");
      cfg.embedding.kind = e.value("kind", cfg.embedding.kind);
      cfg.embedding.dimension = e.value("dimension", cfg.embedding.dimension);
      cfg.embedding.endpoint = e.value("endpoint", std::string{});
      cfg.embedding.model_name = e.value("model_name", std::string{});
      cfg.embedding.api_key_env = e.value("api_key_env", std::string{});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(ErrorCode::kConfigError, path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  if (overrides.mode) cfg.mode = *overrides.mode;
  if (overrides.k) cfg.k = *overrides.k;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.provider_kind) cfg.provider.kind = *overrides.provider_kind;
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (overrides.run_id) cfg.run_id = *overrides.run_id;
  if (cfg.split) cfg.split->scheme.seed = cfg.seed;
  cfg.cascade.max_candidates = cfg.n;
  cfg.validate();
  return cfg;
}

Document config_document(const RunConfig& cfg) {
  Document j = Document::object();
  j["format_version"] = kFormatVersion;
  j["run_id"] = cfg.run_id;
  if (cfg.split) {
    j["dataset_path"] = cfg.split->dataset_path.string();
    j["split_scheme"] = split_kind_name(cfg.split->scheme.kind);
  } else {
    j["train_path"] = cfg.train_path.string();
    j["test_path"] = cfg.test_path.string();
  }
  j["task"] = cfg.task;
  j["mode"] = mode_name(cfg.mode);
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  Document provider = Document::object();
  provider["kind"] = provider_kind_name(cfg.provider.kind);
  provider["endpoint"] = cfg.provider.endpoint;
  provider["model_name"] = cfg.provider.model_name;
  provider["api_key_env"] = cfg.provider.api_key_env;  // the variable name, never its value
  provider["request_timeout_s"] = cfg.provider.request_timeout_s;
  provider["max_retries"] = cfg.provider.max_retries;
  provider["fixture_count"] = cfg.provider.fixtures.size();
  j["provider"] = std::move(provider);
  Document cascade = Document::object();
  cascade["attempt_budget"] = cfg.cascade.attempt_budget;
  cascade["per_stage_timeout_s"] = cfg.cascade.per_stage_timeout_s;
  cascade["sample_size"] = cfg.cascade.sample_size;
  cascade["runner_command"] = cfg.runner_command;
  Document whitelist = Document::object();
  for (StageId s : kAllStages) {
    const auto& set = cfg.cascade.whitelist[stage_index(s)];
    whitelist[std::string(stage_name(s))] = Document{{"modules", set.modules}, {"members", set.members}};
  }
  cascade["whitelist"] = std::move(whitelist);
  j["cascade"] = std::move(cascade);
  j["embedding"] = Document{{"kind", cfg.embedding.kind},
                            {"dimension", cfg.embedding.dimension},
                            {"endpoint", cfg.embedding.endpoint},
                            {"model_name", cfg.embedding.model_name},
                            {"api_key_env", cfg.embedding.api_key_env}};
  return j;
}

fs::path runs_root() {
  if (const char* dir = std::getenv("SPIO_WORKDIR"); dir != nullptr && *dir != '\0') return fs::path(dir);
  return fs::path("runs");
}

}  // namespace spio::cli
