#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "spio/gateway.hpp"
#include "spio/types.hpp"

namespace spio {

struct PcaResult {
  std::vector<std::array<double, 2>> points;
  std::array<std::vector<double>, 2> components;  // unit length, orthogonal
  std::array<double, 2> variances{};              // sample variance along each component
  std::vector<double> mean;
};

inline constexpr double kPcaTolerance = 1e-10;
inline constexpr int kPcaMaxIterations = 10000;

// Two-component PCA of the sample covariance by power iteration with
// deflation. Each component's largest-magnitude loading is made positive.
// Needs at least 3 vectors of a shared dimension >= 2; kDimensionMismatch on
// ragged input, kDegenerateBatch when every vector is the same.
PcaResult pca_project(const std::vector<std::vector<double>>& vectors);

struct EmbeddingVector {
  PlanRef plan_ref;
  std::vector<double> components;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
};

// Offline embedder: signed FNV-1a hashing of word tokens into `dimension`
// buckets, L2-normalized.
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256);
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

// Remote embeddings endpoint taking {"model", "input"} and answering with
// {"data": [{"embedding": [...]}]}. Failures raise kProviderUnreachable.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, std::string model, std::string api_key_env,
               std::unique_ptr<HttpTransport> transport = nullptr, double timeout_s = 60.0);
  std::vector<double> embed(std::string_view text) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_env_;
  std::unique_ptr<HttpTransport> transport_;
  double timeout_s_;
};

// One vector per plan; kDimensionMismatch if the embedder is inconsistent.
std::vector<EmbeddingVector> embed_plans(const std::vector<CandidatePlan>& plans, Embedder& embedder);

// TSV of projected plans: stage, ordinal, x, y. Header only when there are
// fewer than three plans or they all embed identically.
std::string plan_pca_tsv(const std::vector<CandidatePlan>& plans, Embedder& embedder);

}  // namespace spio
