#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>
#include <json.hpp>

#include "eigen_oracle.hpp"
#include "golden_contexts.hpp"
#include "spio/pca.hpp"
#include "test_support.hpp"

namespace spio {
namespace {

using testing::code_of;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

TEST(Pca, Component1MatchesDenseSolver) {
  std::mt19937_64 rng(51);
  for (int batch = 0; batch < 200; ++batch) {
    const auto rows = testing::gaussian_batch(rng, 50, 10);
    const auto got = pca_project(rows);
    const auto want = testing::dense_pca(rows);
    EXPECT_LE(std::abs(got.variances[0] - want.var1) / want.var1, 1e-6) << "batch " << batch;
    // same direction up to sign
    const Eigen::Map<const Eigen::VectorXd> v1(got.components[0].data(), 10);
    EXPECT_NEAR(std::abs(v1.dot(want.v1)), 1.0, 1e-6);
  }
}

TEST(Pca, ComponentsAreOrthonormal) {
  std::mt19937_64 rng(52);
  for (int batch = 0; batch < 200; ++batch) {
    const std::size_t n = 3 + rng() % 40, d = 2 + rng() % 30;
    const auto r = pca_project(testing::gaussian_batch(rng, n, d));
    EXPECT_NEAR(dot(r.components[0], r.components[0]), 1.0, 1e-8);
    EXPECT_NEAR(dot(r.components[1], r.components[1]), 1.0, 1e-8);
    EXPECT_NEAR(dot(r.components[0], r.components[1]), 0.0, 1e-8);
    EXPECT_GE(r.variances[0], r.variances[1] - 1e-9);
  }
}

TEST(Pca, RankOneDataHasNoSecondCoordinate) {
  std::mt19937_64 rng(53);
  for (int batch = 0; batch < 100; ++batch) {
    const auto r = pca_project(testing::rank_one_batch(rng, 20, 8));
    for (const auto& p : r.points) EXPECT_LT(std::abs(p[1]), 1e-8);
    EXPECT_NEAR(dot(r.components[0], r.components[1]), 0.0, 1e-8);
  }
}

TEST(Pca, ProjectionIsCentered) {
  std::mt19937_64 rng(54);
  const auto rows = testing::gaussian_batch(rng, 30, 6);
  const auto r = pca_project(rows);
  double sx = 0, sy = 0;
  for (const auto& p : r.points) {
    sx += p[0];
    sy += p[1];
  }
  EXPECT_NEAR(sx, 0.0, 1e-9);
  EXPECT_NEAR(sy, 0.0, 1e-9);
  // sample variance of the first coordinate equals the reported variance
  double ss = 0;
  for (const auto& p : r.points) ss += p[0] * p[0];
  EXPECT_NEAR(ss / 29.0, r.variances[0], 1e-9 * r.variances[0]);
}

TEST(Pca, SignConvention) {
  std::mt19937_64 rng(55);
  for (int batch = 0; batch < 50; ++batch) {
    const auto r = pca_project(testing::gaussian_batch(rng, 20, 5));
    for (const auto& c : r.components) {
      const auto it = std::max_element(c.begin(), c.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      EXPECT_GT(*it, 0.0);
    }
  }
}

TEST(Pca, RowOrderDoesNotChangeCoordinates) {
  std::mt19937_64 rng(56);
  auto rows = testing::gaussian_batch(rng, 25, 7);
  const auto before = pca_project(rows);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<double>> shuffled;
  for (auto i : order) shuffled.push_back(rows[i]);
  const auto after = pca_project(shuffled);
  for (std::size_t k = 0; k < order.size(); ++k) {
    EXPECT_NEAR(after.points[k][0], before.points[order[k]][0], 1e-8);
    EXPECT_NEAR(after.points[k][1], before.points[order[k]][1], 1e-8);
  }
}

TEST(Pca, DuplicatesAreFine) {
  const std::vector<std::vector<double>> rows = {{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}};
  const auto r = pca_project(rows);
  EXPECT_EQ(r.points.size(), 5u);
  EXPECT_NEAR(r.points[0][0], r.points[1][0], 1e-12);
  EXPECT_NEAR(r.points[0][1], r.points[1][1], 1e-12);
}

TEST(Pca, Guards) {
  EXPECT_EQ(code_of([] { pca_project({{1, 2}, {1, 2}, {1, 2}}); }), ErrorCode::kDegenerateBatch);
  EXPECT_EQ(code_of([] { pca_project({{1, 2}, {1, 2, 3}, {1, 2}}); }), ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] { pca_project({{1, 2}, {3, 4}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { pca_project({{1}, {2}, {3}}); }), ErrorCode::kInvalidArgument);
}

TEST(HashingEmbedder, UnitLengthAndDeterministic) {
  HashingEmbedder e(64);
  const auto a = e.embed("Impute missing values with the median");
  EXPECT_EQ(a.size(), 64u);
  EXPECT_NEAR(dot(a, a), 1.0, 1e-12);
  EXPECT_EQ(e.embed("impute MISSING values, with the median!"), a);
  EXPECT_NE(e.embed("Grid search over C"), a);
  const auto empty = e.embed("");
  EXPECT_EQ(dot(empty, empty), 0.0);
  EXPECT_EQ(code_of([] { HashingEmbedder(1); }), ErrorCode::kInvalidArgument);
}

TEST(PlanPca, TableForLedgerPlans) {
  HashingEmbedder e;
  const auto ledger = testing::golden_ledger();
  const auto tsv = plan_pca_tsv(ledger.candidates, e);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 9);
  EXPECT_EQ(tsv.rfind("stage\tordinal\tx\ty\npreprocess\t1\t", 0), 0u);
  EXPECT_EQ(plan_pca_tsv(ledger.candidates, e), tsv);
  const std::vector<CandidatePlan> two(ledger.candidates.begin(), ledger.candidates.begin() + 2);
  EXPECT_EQ(plan_pca_tsv(two, e), "stage\tordinal\tx\ty\n");
  std::vector<CandidatePlan> same(3, ledger.candidates.front());
  EXPECT_EQ(plan_pca_tsv(same, e), "stage\tordinal\tx\ty\n");
}

class CannedTransport : public HttpTransport {
 public:
  CannedTransport(HttpReply reply, std::string* body) : reply_(std::move(reply)), body_(body) {}
  HttpReply post(const std::string&, const std::map<std::string, std::string>&, const std::string& body,
                 double) override {
    *body_ = body;
    return reply_;
  }

 private:
  HttpReply reply_;
  std::string* body_;
};

TEST(HttpEmbedder, RequestAndResponse) {
  std::string body;
  HttpEmbedder e("http://127.0.0.1:9/v1/embeddings", "emb-model", "",
                 std::make_unique<CannedTransport>(HttpReply{200, R"({"data":[{"embedding":[0.5,0.25]}]})"}, &body));
  EXPECT_EQ(e.embed("some plan"), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(nlohmann::json::parse(body), (nlohmann::json{{"model", "emb-model"}, {"input", "some plan"}}));
}

TEST(HttpEmbedder, FailuresAreUnreachable) {
  std::string body;
  HttpEmbedder bad_status("http://x/e", "m", "", std::make_unique<CannedTransport>(HttpReply{500, ""}, &body));
  EXPECT_EQ(code_of([&] { bad_status.embed("x"); }), ErrorCode::kProviderUnreachable);
  HttpEmbedder bad_body("http://x/e", "m", "", std::make_unique<CannedTransport>(HttpReply{200, "{}"}, &body));
  EXPECT_EQ(code_of([&] { bad_body.embed("x"); }), ErrorCode::kProviderUnreachable);
}

}  // namespace
}  // namespace spio
