#include <chrono>
#include <ctime>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "spio/analytics.hpp"
#include "spio/cli.hpp"
#include "spio/dataset.hpp"
#include "spio/ensemble.hpp"
#include "spio/pca.hpp"
#include "spio/realize.hpp"
#include "spio/selection.hpp"
#include "spio/text_util.hpp"

namespace spio::cli {

namespace fs = std::filesystem;

namespace {

std::string generate_run_id() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::random_device rd;
  std::string suffix;
  for (int i = 0; i < 4; ++i) suffix.push_back(kAlphabet[rd() % kAlphabet.size()]);
  return std::string(stamp) + "-" + suffix;
}

struct Prepared {
  fs::path train;
  fs::path test;
  std::optional<fs::path> truth;
};

// Splits a single dataset into agent-visible train/test files. The target is
// removed from the test file and kept aside for scoring.
Prepared prepare_data(const RunConfig& cfg, const fs::path& run_dir) {
  if (!cfg.split) return {cfg.train_path, cfg.test_path, std::nullopt};
  const CsvTable table = read_csv(cfg.split->dataset_path);
  const auto target = table.column(cfg.task.target_column);
  if (!target) fail(ErrorCode::kConfigError, "target column '" + cfg.task.target_column + "' not in dataset");
  const Partition parts = split(table.rows.size(), cfg.split->scheme);
  const auto& test_rows = cfg.split->scheme.kind == SplitKind::kHoldout70_30 ? parts.validation : parts.test;

  const fs::path data = run_dir / "data";
  auto subset = [&](const std::vector<std::size_t>& rows) {
    CsvTable out;
    out.header = table.header;
    for (auto r : rows) out.rows.push_back(table.rows[r]);
    return out;
  };
  write_csv(data / "train.csv", subset(parts.train));
  if (cfg.split->scheme.kind == SplitKind::kThreeWay70_10_20) write_csv(data / "validation.csv", subset(parts.validation));
  CsvTable test;
  CsvTable truth;
  truth.header = {cfg.task.target_column};
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != *target) test.header.push_back(table.header[c]);
  }
  for (auto r : test_rows) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c != *target) row.push_back(table.rows[r][c]);
    }
    test.rows.push_back(std::move(row));
    truth.rows.push_back({table.rows[r][*target]});
  }
  write_csv(data / "test.csv", test);
  write_csv(data / "test_truth.csv", truth);
  return {data / "train.csv", data / "test.csv", data / "test_truth.csv"};
}

Document state_document(const std::string& run_id, Mode mode, const PlanLedger& ledger, const RunLedger& run,
                        const std::vector<PipelinePath>& paths, std::string_view status,
                        const std::string& error) {
  Document j = Document::object();
  j["format_version"] = kFormatVersion;
  j["run_id"] = run_id;
  j["mode"] = mode_name(mode);
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["plan_ledger"] = ledger;
  j["run_ledger"] = run;
  j["paths"] = paths;
  return j;
}

std::unique_ptr<Embedder> make_embedder(const Document& config) {
  const auto e = config.value("embedding", Document::object());
  if (e.value("kind", std::string("hashing")) == "http") {
    return std::make_unique<HttpEmbedder>(e.value("endpoint", std::string{}), e.value("model_name", std::string{}),
                                          e.value("api_key_env", std::string{}));
  }
  return std::make_unique<HashingEmbedder>(e.value("dimension", std::size_t{256}));
}

// Uniform mean of probabilistic members; label output when any member
// lacks probabilities or the label sets differ.
PredictionSet mean_probabilities(const std::vector<PredictionSet>& members) {
  ProbabilityMatrix mean;
  for (const auto& m : members) {
    if (m.kind != PredictionKind::kClassProbabilities) return m;
    if (mean.labels.empty()) {
      mean = m.probabilities;
      continue;
    }
    if (m.probabilities.labels != mean.labels || m.probabilities.rows.size() != mean.rows.size()) return m;
    for (std::size_t r = 0; r < mean.rows.size(); ++r) {
      for (std::size_t c = 0; c < mean.labels.size(); ++c) mean.rows[r][c] += m.probabilities.rows[r][c];
    }
  }
  for (auto& row : mean.rows) {
    for (double& v : row) v /= static_cast<double>(members.size());
  }
  PredictionSet out;
  out.kind = PredictionKind::kClassProbabilities;
  out.probabilities = std::move(mean);
  return out;
}

// Held-out target values written by prepare_data: one column, the target.
PredictionSet load_truth(const fs::path& path, TaskKind task_kind) {
  const CsvTable table = read_csv(path);
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& row : table.rows) {
    if (is_classification(task_kind)) {
      labels.push_back(row.at(0));
      continue;
    }
    try {
      values.push_back(std::stod(row.at(0)));
    } catch (const std::exception&) {
      fail(ErrorCode::kConfigError, "non-numeric regression target '" + row.at(0) + "'");
    }
  }
  return is_classification(task_kind) ? PredictionSet::from_labels(std::move(labels))
                                      : PredictionSet::from_values(std::move(values));
}

fs::path find_run(const std::string& run_id) {
  const fs::path dir = runs_root() / run_id;
  if (run_id.empty() || !fs::is_regular_file(dir / "ledger.json")) {
    fail(ErrorCode::kConfigError, "unknown run '" + run_id + "' under " + runs_root().string());
  }
  return dir;
}

std::string render_report(const fs::path& run_dir, std::string_view kind) {
  const Document state = load_document(run_dir / "ledger.json");
  if (kind == "tokens") return tokens_tsv(token_breakdown(decode<RunLedger>(state.at("run_ledger"))));
  if (kind == "fr") return fr_tsv(traces_from_run(decode<RunLedger>(state.at("run_ledger"))));
  if (kind == "pca") {
    const auto ledger = decode<PlanLedger>(state.at("plan_ledger"));
    const Document config = load_document(run_dir / "config.json");
    auto embedder = make_embedder(config);
    return plan_pca_tsv(ledger.candidates, *embedder);
  }
  fail(ErrorCode::kConfigError, "unknown report kind '" + std::string(kind) + "' (tokens, fr, pca)");
}

void write_reports(const fs::path& run_dir) {
  for (std::string_view kind : {"tokens", "fr", "pca"}) {
    const std::string file = kind == "pca" ? "plan_pca.tsv" : std::string(kind) + ".tsv";
    write_file(run_dir / "reports" / file, render_report(run_dir, kind));
  }
}

int cmd_run(const fs::path& config_path, const Overrides& overrides, std::ostream& out) {
  RunConfig cfg = load_config(config_path, overrides);
  if (cfg.run_id.empty()) cfg.run_id = generate_run_id();
  const fs::path run_dir = fs::absolute(runs_root() / cfg.run_id);
  if (fs::exists(run_dir)) fail(ErrorCode::kConfigError, "run directory already exists: " + run_dir.string());
  fs::create_directories(run_dir);
  save_document(run_dir / "config.json", config_document(cfg));

  const Prepared data = prepare_data(cfg, run_dir);
  CascadeInputs inputs;
  try {
    inputs = load_inputs(data.train, data.test, cfg.task, cfg.cascade.sample_size);
  } catch (const Error& e) {
    if (exit_class(e.code()) == ExitClass::kConfig) fail(ErrorCode::kConfigError, e.what());
    throw;
  }
  cfg.cascade.workdir = run_dir / "work";
  Gateway gateway(cfg.provider, run_dir / "transcripts");
  ExternalRunner runner(cfg.runner_command);
  const CascadeEnv env{cfg.cascade, inputs, gateway, runner};

  RunLedger run;
  PlanLedger ledger;
  ledger.max_candidates_per_stage = cfg.n;
  std::vector<PipelinePath> paths;
  const auto save = [&](std::string_view status, const std::string& error = {}) {
    save_document(run_dir / "ledger.json", state_document(cfg.run_id, cfg.mode, ledger, run, paths, status, error));
  };
  save("running");

  try {
    ledger = run_cascade(run, env, [&](const PlanLedger& snapshot) {
      ledger = snapshot;
      save("running");
    });
    if (cfg.mode == Mode::kSpioS) {
      paths = {select_single(ledger, run, gateway, inputs)};
    } else {
      paths = select_topk(ledger, run, gateway, inputs, cfg.k);
    }
    save("running");
    auto realized = realize_paths(paths, ledger, run, env, cfg.workers);
    std::vector<PredictionSet> members;
    for (std::size_t i = 0; i < realized.size(); ++i) {
      paths[i] = realized[i].path;
      members.push_back(realized[i].predictions);
    }
    PredictionSet final_predictions = members.size() == 1 && !is_classification(cfg.task.task_kind)
                                          ? members.front()
                                          : combine_members(members, cfg.task.task_kind);
    write_predictions(run_dir / "predictions.csv", final_predictions);
    save("complete");
    write_reports(run_dir);

    out << "run " << cfg.run_id << ": " << ledger.artifacts.size() << " stages, " << ledger.candidates.size()
        << " plans, " << paths.size() << " paths realized\n";
    out << "predictions: " << (run_dir / "predictions.csv").string() << " (" << final_predictions.instance_count()
        << " rows)\n";
    if (data.truth) {
      const PredictionSet truth = load_truth(*data.truth, cfg.task.task_kind);
      // Soft-voted output carries labels; ROC_AUC is scored on the members'
      // mean probabilities instead.
      PredictionSet scored = final_predictions;
      if (cfg.task.metric == Metric::kRocAuc) scored = mean_probabilities(members);
      if (cfg.task.metric != Metric::kRocAuc || scored.kind == PredictionKind::kClassProbabilities) {
        const double value = score(cfg.task.metric, scored, truth);
        write_file(run_dir / "reports" / "score.tsv",
                   "metric\tvalue\n" + std::string(metric_name(cfg.task.metric)) + "\t" + format_fixed6(value) + "\n");
        out << metric_name(cfg.task.metric) << ": " << format_fixed6(value) << "\n";
      }
    }
  } catch (const Error& e) {
    save("failed", e.what());
    try {
      write_reports(run_dir);
    } catch (const Error&) {
      // The original failure is the one worth reporting.
    }
    throw;
  }
  return 0;
}

int cmd_report(const std::string& run_id, const std::string& kind, std::ostream& out) {
  const fs::path run_dir = find_run(run_id);
  const std::string text = render_report(run_dir, kind);
  write_file(run_dir / "reports" / (kind == "pca" ? "plan_pca.tsv" : kind + ".tsv"), text);
  out << text;
  return 0;
}

int cmd_inspect(const std::string& run_id, std::ostream& out) {
  const Document state = load_document(find_run(run_id) / "ledger.json");
  const auto ledger = decode<PlanLedger>(state.at("plan_ledger"));
  out << "run " << state.value("run_id", std::string{}) << " (" << state.value("mode", std::string{}) << ", "
      << state.value("status", std::string{}) << ")\n";
  for (StageId s : kAllStages) {
    out << "\n[" << stage_name(s) << "]";
    if (const auto it = ledger.artifacts.find(s); it != ledger.artifacts.end()) {
      const auto& a = it->second;
      out << " attempts=" << a.attempt_count;
      if (const auto* d = a.summary()) out << " output=" << d->row_count << "x" << d->column_specs.size();
      if (const auto v = a.validation_score()) out << " validation_score=" << format_double(*v);
    } else {
      out << " not recorded";
    }
    out << "\n";
    for (const auto& p : ledger.plans_for(s)) {
      out << "  Plan " << p.ordinal << ": " << p.plan_text << "\n";
      if (!p.scenario.empty()) out << "    Scenario: " << p.scenario << "\n";
      if (!p.rationale.empty()) out << "    Rationale: " << p.rationale << "\n";
    }
  }
  const auto paths = decode<std::vector<PipelinePath>>(state.value("paths", Document::array()));
  if (!paths.empty()) out << "\n[selected paths]\n";
  for (const auto& path : paths) {
    out << "  rank " << path.rank << ":";
    for (StageId s : kAllStages) out << " " << stage_name(s) << "=" << path.at(s).ordinal;
    out << (path.final_code ? " (realized)" : "") << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Staged planning and ensembling engine for tabular ML pipelines", "spio"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode;
  std::string provider_kind;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> run_id;
  auto* run = app.add_subcommand("run", "Run the staged cascade, select paths and write predictions");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--mode", mode, "spio_s or spio_e");
  run->add_option("--k", k, "Number of ensembled paths (spio_e)");
  run->add_option("--seed", seed, "Split seed");
  run->add_option("--provider.kind", provider_kind, "scripted or http_chat");
  run->add_option("--workers", workers, "Parallel path realizations");
  run->add_option("--run-id", run_id, "Run directory name");

  std::string report_run;
  std::string report_kind;
  auto* report = app.add_subcommand("report", "Regenerate a report of a finished run");
  report->add_option("run-id", report_run)->required();
  report->add_option("kind", report_kind, "tokens, fr or pca")->required();

  std::string inspect_run;
  auto* inspect = app.add_subcommand("inspect-plans", "Print the plan ledger of a run");
  inspect->add_option("run-id", inspect_run)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "SPIO-ERR config: " << e.what() << "\n" << app.help();
    return static_cast<int>(ExitClass::kConfig);
  }

  try {
    if (run->parsed()) {
      Overrides overrides;
      try {
        if (!mode.empty()) overrides.mode = parse_mode(mode);
        if (!provider_kind.empty()) overrides.provider_kind = parse_provider_kind(provider_kind);
      } catch (const Error& e) {
        fail(ErrorCode::kConfigError, e.what());
      }
      overrides.k = k;
      overrides.seed = seed;
      overrides.workers = workers;
      overrides.run_id = run_id;
      return cmd_run(config_path, overrides, out);
    }
    if (report->parsed()) return cmd_report(report_run, report_kind, out);
    return cmd_inspect(inspect_run, out);
  } catch (const Error& e) {
    const ExitClass c = exit_class(e.code());
    err << "SPIO-ERR " << exit_class_name(c) << ": " << e.what() << "\n";
    return static_cast<int>(c);
  } catch (const std::exception& e) {
    err << "SPIO-ERR internal: " << e.what() << "\n";
    return static_cast<int>(ExitClass::kInternal);
  }
}

}  // namespace spio::cli
