#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "spio/analytics.hpp"
#include "spio/cli.hpp"
#include "spio/dataset.hpp"
#include "spio/text_util.hpp"
#include "test_support.hpp"

namespace spio {
namespace {

namespace fs = std::filesystem;
using testing::code_of;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(ExitCodes, EveryErrorHasOneClass) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kDimensionMismatch); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    const int exit = static_cast<int>(cli::exit_class(code));
    EXPECT_GE(exit, 1) << to_string(code);
    EXPECT_LE(exit, 5) << to_string(code);
    EXPECT_FALSE(cli::exit_class_name(cli::exit_class(code)).empty());
    EXPECT_FALSE(to_string(code).empty());
  }
  EXPECT_EQ(cli::exit_class(ErrorCode::kConfigError), cli::ExitClass::kConfig);
  EXPECT_EQ(cli::exit_class(ErrorCode::kTooFewRows), cli::ExitClass::kConfig);
  EXPECT_EQ(cli::exit_class(ErrorCode::kStageFailed), cli::ExitClass::kStage);
  EXPECT_EQ(cli::exit_class(ErrorCode::kPredictionShapeMismatch), cli::ExitClass::kStage);
  EXPECT_EQ(cli::exit_class(ErrorCode::kUnmappablePlan), cli::ExitClass::kSelection);
  EXPECT_EQ(cli::exit_class(ErrorCode::kFixtureExhausted), cli::ExitClass::kProvider);
  EXPECT_EQ(cli::exit_class(ErrorCode::kInvalidArgument), cli::ExitClass::kInternal);
}

class ConfigTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir("config");
    write_file(dir_ / "train.csv", "id,x,label\n1,2,a\n");
    write_file(dir_ / "test.csv", "id,x\n1,2\n");
  }

  fs::path write(const std::string& text) {
    write_file(dir_ / "run.json", text);
    return dir_ / "run.json";
  }

  std::string base(const std::string& extra = "") {
    return R"({"train_path": "train.csv", "test_path": "test.csv",
      "task": {"task_kind": "binary_classification", "target_column": "label", "metric": "ACC"},
      "provider": {"kind": "scripted", "fixtures": [{"response_text": "x"}]})" +
           extra + "}";
  }

  fs::path dir_;
};

TEST_F(ConfigTest, LoadsAndResolvesRelativePaths) {
  const auto cfg = cli::load_config(write(base()));
  EXPECT_EQ(cfg.train_path, dir_ / "train.csv");
  EXPECT_EQ(cfg.mode, cli::Mode::kSpioE);
  EXPECT_EQ(cfg.k, 2);
  EXPECT_EQ(cfg.cascade.max_candidates, 2);
  EXPECT_EQ(cfg.provider.fixtures.size(), 1u);
}

TEST_F(ConfigTest, OverridesWin) {
  cli::Overrides o;
  o.mode = cli::Mode::kSpioS;
  o.k = 4;
  o.seed = 9;
  const auto cfg = cli::load_config(write(base(R"(, "k": 3, "seed": 1)")), o);
  EXPECT_EQ(cfg.mode, cli::Mode::kSpioS);
  EXPECT_EQ(cfg.k, 4);
  EXPECT_EQ(cfg.seed, 9u);
}

TEST_F(ConfigTest, ProblemsAreConfigErrors) {
  EXPECT_EQ(code_of([&] { cli::load_config(dir_ / "absent.json"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cli::load_config(write("{not json")); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cli::load_config(write(base(R"(, "mode": "spio_x")"))); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cli::load_config(write(base(R"(, "k": 0)"))); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cli::load_config(write(base(R"(, "cascade": {"attempt_budget": 0})"))); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] {
              cli::load_config(write(R"({"train_path": "train.csv", "test_path": "test.csv",
                "task": {"task_kind": "regression", "target_column": "label", "metric": "ACC"},
                "provider": {"kind": "scripted", "fixtures": [{"response_text": "x"}]}})"));
            }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] {
              cli::load_config(write(R"({"train_path": "nowhere.csv", "test_path": "test.csv",
                "task": {"task_kind": "binary_classification", "target_column": "label", "metric": "ACC"},
                "provider": {"kind": "scripted", "fixtures": [{"response_text": "x"}]}})"));
            }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cli::load_config(write(base(R"(, "provider": {"kind": "scripted"})"))); }),
            ErrorCode::kConfigError);
}

TEST_F(ConfigTest, SavedConfigHoldsKeyNameNotValue) {
  ::setenv("SPIO_CFG_TEST_KEY", "sk-very-secret", 1);
  const auto cfg = cli::load_config(write(base(R"(, "provider": {"kind": "http_chat",
      "endpoint": "https://example.invalid/v1/chat/completions", "api_key_env": "SPIO_CFG_TEST_KEY"})")));
  const auto text = dump_document(cli::config_document(cfg));
  EXPECT_NE(text.find("SPIO_CFG_TEST_KEY"), std::string::npos);
  EXPECT_EQ(text.find("sk-very-secret"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  auto r = cli({});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("SPIO-ERR config:", 0), 0u);
  r = cli({"run"});
  EXPECT_EQ(r.code, 2);
  r = cli({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("inspect-plans"), std::string::npos);
}

TEST(Cli, MissingTrainFileIsConfigError) {
  const auto dir = testing::scratch_dir("cli-missing");
  write_file(dir / "run.json", R"({"train_path": "missing.csv", "test_path": "missing_test.csv",
    "task": {"task_kind": "binary_classification", "target_column": "label", "metric": "ACC"},
    "provider": {"kind": "scripted", "fixtures": [{"response_text": "x"}]}})");
  ::setenv("SPIO_WORKDIR", (dir / "runs").c_str(), 1);
  const auto r = cli({"run", "--config", (dir / "run.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("SPIO-ERR config:", 0), 0u) << r.err;
  EXPECT_FALSE(fs::exists(dir / "runs"));
}

TEST(Cli, UnknownRunForReports) {
  const auto dir = testing::scratch_dir("cli-unknown");
  ::setenv("SPIO_WORKDIR", dir.c_str(), 1);
  EXPECT_EQ(cli({"report", "nope", "tokens"}).code, 2);
  EXPECT_EQ(cli({"inspect-plans", "nope"}).code, 2);
}

class EndToEnd : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = testing::scratch_dir("cli-e2e");
    ::setenv("SPIO_WORKDIR", root_.c_str(), 1);
  }

  testing::E2eOptions options(const std::string& run_id) {
    testing::E2eOptions o;
    o.root = root_;
    o.run_id = run_id;
    o.runner = SPIO_STUB_RUNNER;
    return o;
  }

  fs::path root_;
};

TEST_F(EndToEnd, EnsembleRunWritesEveryArtifact) {
  const auto o = options("ens");
  const auto config = testing::write_e2e_config(o);
  const auto r = cli({"run", "--config", config.string(), "--mode", "spio_e", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path run = root_ / "ens";

  const auto state = load_document(run / "ledger.json");
  EXPECT_EQ(state.at("status"), "complete");
  EXPECT_EQ(state.at("format_version"), 1);
  const auto ledger = decode<PlanLedger>(state.at("plan_ledger"));
  EXPECT_EQ(ledger.artifacts.size(), 4u);
  EXPECT_EQ(ledger.candidates.size(), 8u);
  const auto paths = decode<std::vector<PipelinePath>>(state.at("paths"));
  ASSERT_EQ(paths.size(), 2u);
  for (const auto& p : paths) EXPECT_TRUE(p.final_code);
  EXPECT_EQ(paths[1].at(StageId::kPreprocess).ordinal, 2);

  EXPECT_EQ(testing::csv_rows(run / "data" / "train.csv"), 140u);
  EXPECT_EQ(testing::csv_rows(run / "data" / "validation.csv"), 20u);
  EXPECT_EQ(testing::csv_rows(run / "data" / "test.csv"), 40u);
  EXPECT_FALSE(read_csv(run / "data" / "test.csv").column("label"));
  EXPECT_EQ(testing::csv_rows(run / "predictions.csv"), 40u);
  EXPECT_EQ(testing::csv_rows(run / "work" / "final_2" / "predictions.csv"), 40u);
  for (const char* f : {"tokens.tsv", "fr.tsv", "plan_pca.tsv", "score.tsv"}) {
    EXPECT_TRUE(fs::exists(run / "reports" / f)) << f;
  }
  for (int s = 1; s <= 4; ++s) {
    const auto attempt = run / "work" / ("stage_" + std::to_string(s)) / "attempt_1";
    for (const char* f : {"code.src", "manifest.json", "stdout.log", "stderr.log"}) {
      EXPECT_TRUE(fs::exists(attempt / f)) << attempt / f;
    }
  }
  std::size_t transcripts = 0;
  for (const auto& e : fs::directory_iterator(run / "transcripts")) transcripts += e.is_regular_file();
  EXPECT_EQ(transcripts, testing::e2e_fixture_count(o));
  EXPECT_NE(r.out.find("4 stages, 8 plans, 2 paths realized"), std::string::npos);
  EXPECT_NE(r.out.find("(40 rows)"), std::string::npos);

  // the model stage scored on its own holdout
  const auto model = ledger.artifacts.at(StageId::kModelSelection).validation_score();
  ASSERT_TRUE(model);
  EXPECT_GT(*model, 0.5);

  // reports regenerate identically
  const auto tokens = cli({"report", "ens", "tokens"});
  ASSERT_EQ(tokens.code, 0) << tokens.err;
  EXPECT_EQ(tokens.out, read_file(run / "reports" / "tokens.tsv"));
  EXPECT_EQ(cli({"report", "ens", "tokens"}).out, tokens.out);
  const auto rows = parse_tokens_tsv(tokens.out);
  ASSERT_EQ(rows.size(), 12u);  // 11 step labels + total
  EXPECT_EQ(rows.back().step_label, "total");
  const auto fr = cli({"report", "ens", "fr"});
  EXPECT_EQ(fr.code, 0);
  EXPECT_EQ(fr.out, read_file(run / "reports" / "fr.tsv"));
  EXPECT_NE(fr.out.find("all\t6\t0.000000"), std::string::npos);
  EXPECT_EQ(cli({"report", "ens", "pca"}).out, read_file(run / "reports" / "plan_pca.tsv"));
  EXPECT_EQ(cli({"report", "ens", "histogram"}).code, 2);

  const auto inspect = cli({"inspect-plans", "ens"});
  EXPECT_EQ(inspect.code, 0);
  EXPECT_NE(inspect.out.find("[model_selection] attempts=1 validation_score="), std::string::npos);
  EXPECT_NE(inspect.out.find("  Plan 2: " + testing::plan_texts()[3][1]), std::string::npos);
  EXPECT_NE(inspect.out.find("rank 2: preprocess=2 feature_engineering=1 model_selection=2"), std::string::npos);

  // a second run with the same id is refused
  EXPECT_EQ(cli({"run", "--config", config.string()}).code, 2);
}

TEST_F(EndToEnd, SingleRun) {
  auto o = options("single");
  o.mode = "spio_s";
  const auto r = cli({"run", "--config", testing::write_e2e_config(o).string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto state = load_document(root_ / "single" / "ledger.json");
  EXPECT_EQ(state.at("mode"), "spio_s");
  EXPECT_EQ(state.at("paths").size(), 1u);
  EXPECT_EQ(testing::csv_rows(root_ / "single" / "predictions.csv"), 40u);
}

TEST_F(EndToEnd, RetriedPreprocessIsLogged) {
  auto o = options("retry");
  o.preprocess_failures = 2;
  const auto r = cli({"run", "--config", testing::write_e2e_config(o).string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto run = decode<RunLedger>(load_document(root_ / "retry" / "ledger.json").at("run_ledger"));
  std::vector<AttemptStatus> preprocess;
  for (const auto& log : run.attempt_logs()) {
    if (log.stage == StageId::kPreprocess) preprocess.push_back(log.status);
  }
  EXPECT_EQ(preprocess, (std::vector{AttemptStatus::kExecError, AttemptStatus::kExecError, AttemptStatus::kOk}));
  EXPECT_NE(read_file(root_ / "retry" / "work" / "stage_1" / "attempt_1" / "stderr.log").find("intentional failure 1"),
            std::string::npos);
}

TEST_F(EndToEnd, ExhaustedBudgetExitsWithStageClass) {
  auto o = options("failing");
  o.preprocess_failures = 3;
  o.attempt_budget = 3;
  const auto r = cli({"run", "--config", testing::write_e2e_config(o).string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("SPIO-ERR stage:", 0), 0u) << r.err;
  const auto state = load_document(root_ / "failing" / "ledger.json");
  EXPECT_EQ(state.at("status"), "failed");
  EXPECT_NE(state.at("error").get<std::string>().find("StageFailed"), std::string::npos);
  EXPECT_NE(read_file(root_ / "failing" / "reports" / "fr.tsv").find("preprocess\t1\t1.000000\t1.000000"),
            std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "failing" / "work" / "stage_2"));
}

TEST_F(EndToEnd, TooFewFixturesIsProviderError) {
  auto o = options("short");
  const auto config = testing::write_e2e_config(o);
  auto doc = load_document(config);
  auto& fixtures = doc["provider"]["fixtures"];
  fixtures.erase(fixtures.size() - 1);
  save_document(config, doc);
  const auto r = cli({"run", "--config", config.string()});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("FixtureExhausted"), std::string::npos);
}

TEST_F(EndToEnd, BinaryExitCodes) {
  const auto none = testing::run_spio(root_, {});
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_EQ(testing::run_spio(root_, {"--help"}).exit_code, 0);
  const auto missing = testing::run_spio(root_, {"run", "--config", "absent.json"});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(missing.stderr_text.rfind("SPIO-ERR config:", 0), 0u);
}

// The guard used by the zero-network check must actually see a connect.
TEST_F(EndToEnd, NetguardRecordsConnectAttempts) {
  const auto config = testing::write_e2e_config(options("net"));
  auto doc = load_document(config);
  doc["provider"] = Document{{"kind", "http_chat"},
                             {"endpoint", "http://127.0.0.1:9/v1/chat/completions"},
                             {"model_name", "m"},
                             {"max_retries", 0}};
  save_document(config, doc);
  const fs::path log = root_ / "netguard.log";
  const auto proc = testing::run_spio(root_, {"run", "--config", config.string()}, log);
  EXPECT_EQ(proc.exit_code, 5) << proc.stderr_text;
  ASSERT_TRUE(fs::exists(log));
  EXPECT_NE(read_file(log).find("connect"), std::string::npos);
}

}  // namespace
}  // namespace spio
