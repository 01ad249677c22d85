#include <gtest/gtest.h>

#include "spio/whitelist.hpp"
#include "test_support.hpp"
#include "whitelist_corpus.hpp"

namespace spio {
namespace {

using testing::code_of;

std::string identifiers(const WhitelistReport& r) {
  std::string out;
  for (const auto& v : r.violations) out += v.identifier + "@" + std::to_string(v.line_number) + " ";
  return out;
}

TEST(Whitelist, CorpusIsLargeEnough) {
  EXPECT_GE(testing::violating_snippets().size(), 20u);
  EXPECT_GE(testing::compliant_snippets().size(), 20u);
}

TEST(Whitelist, EveryViolationIsDetected) {
  const auto wl = default_whitelist();
  for (const auto& s : testing::violating_snippets()) {
    const auto report = check_whitelist(s.code, s.stage, wl);
    ASSERT_FALSE(report.compliant()) << s.code;
    EXPECT_EQ(report.violations.front(), (WhitelistViolation{s.stage, s.identifier, s.line}))
        << s.code << " -> " << identifiers(report);
  }
}

TEST(Whitelist, NoFalsePositives) {
  const auto wl = default_whitelist();
  for (const auto& s : testing::compliant_snippets()) {
    const auto report = check_whitelist(s.code, s.stage, wl);
    EXPECT_TRUE(report.compliant()) << s.code << " -> " << identifiers(report);
    EXPECT_FALSE(report.fallback_scan);
  }
}

TEST(Whitelist, StageScoping) {
  const auto wl = default_whitelist();
  const std::string code = "from sklearn.svm import SVC\n";
  EXPECT_FALSE(check_whitelist(code, StageId::kModelSelection, wl).compliant());
  EXPECT_TRUE(check_whitelist(code, StageId::kHyperparameterTuning, wl).compliant());
  EXPECT_TRUE(check_whitelist(code, StageId::kModelSelection, union_allow_set(wl)).compliant());
}

TEST(Whitelist, TuningIsSupersetOfEarlierStages) {
  const auto wl = default_whitelist();
  const auto& tuning = wl[stage_index(StageId::kHyperparameterTuning)];
  for (int s = 0; s < 3; ++s) {
    for (const auto& m : wl[s].members) EXPECT_TRUE(tuning.members.contains(m)) << m;
    for (const auto& m : wl[s].modules) EXPECT_TRUE(tuning.modules.contains(m)) << m;
  }
}

TEST(Whitelist, ReportsEveryDistinctViolation) {
  const auto report = check_whitelist("import torch\nimport scipy\nimport torch\n", StageId::kPreprocess,
                                      default_whitelist());
  ASSERT_EQ(report.violations.size(), 3u);
  EXPECT_EQ(report.violations[0].identifier, "torch");
  EXPECT_EQ(report.violations[1].identifier, "scipy");
  EXPECT_EQ(report.violations[2].line_number, 3);
}

TEST(Whitelist, UnterminatedStringFallsBackToLineScan) {
  const auto report = check_whitelist("import sklearn\ns = 'open\n", StageId::kPreprocess, default_whitelist());
  EXPECT_TRUE(report.fallback_scan);
  ASSERT_FALSE(report.compliant());
  EXPECT_EQ(report.violations[0].identifier, "sklearn");
}

TEST(Whitelist, StringsAndCommentsAreIgnored) {
  const auto report = check_whitelist("s = \"\"\"\nimport torch\n\"\"\"\nt = r'import scipy'  # import keras\n",
                                      StageId::kPreprocess, default_whitelist());
  EXPECT_TRUE(report.compliant()) << identifiers(report);
}

TEST(Whitelist, EmptyCodeRejected) {
  EXPECT_EQ(code_of([] { check_whitelist("  \n", StageId::kPreprocess, default_whitelist()); }),
            ErrorCode::kInvalidArgument);
}

TEST(Whitelist, StdlibRoots) {
  EXPECT_TRUE(is_stdlib_module("os"));
  EXPECT_TRUE(is_stdlib_module("collections"));
  EXPECT_FALSE(is_stdlib_module("numpy"));
  EXPECT_FALSE(is_stdlib_module("sklearn"));
}

TEST(Whitelist, MergeIsUnion) {
  AllowSet a{{"numpy"}, {"x:A"}};
  const AllowSet b{{"pandas"}, {"x:B"}};
  a.merge(b);
  EXPECT_EQ(a, (AllowSet{{"numpy", "pandas"}, {"x:A", "x:B"}}));
}

}  // namespace
}  // namespace spio
