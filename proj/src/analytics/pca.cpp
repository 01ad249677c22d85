#include "spio/pca.hpp"

#include <cmath>
#include <numeric>

#include "spio/error.hpp"

namespace spio {

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, square

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec multiply(const Mat& m, const Vec& v) {
  Vec out(v.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

void orthogonalize(Vec& v, const Vec& against) {
  const double p = dot(v, against);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * against[i];
}

void normalize(Vec& v) {
  const double n = norm(v);
  for (double& x : v) x /= n;
}

double frobenius(const Mat& m) {
  double s = 0.0;
  for (const auto& row : m) s += dot(row, row);
  return std::sqrt(s);
}

// Starting vector: the covariance column (== row) with the largest norm.
Vec start_vector(const Mat& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (dot(c[i], c[i]) > dot(c[best], c[best])) best = i;
  }
  return c[best];
}

Vec power_iteration(const Mat& c, Vec v, const Vec* deflated) {
  if (deflated) orthogonalize(v, *deflated);
  normalize(v);
  for (int it = 0; it < kPcaMaxIterations; ++it) {
    Vec w = multiply(c, v);
    if (deflated) orthogonalize(w, *deflated);
    const double n = norm(w);
    if (n == 0.0) break;
    for (double& x : w) x /= n;
    double change = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) change += (w[i] - v[i]) * (w[i] - v[i]);
    v = std::move(w);
    if (std::sqrt(change) < kPcaTolerance) break;
  }
  return v;
}

// Unit vector orthogonal to `v`: the basis vector where v is smallest.
Vec orthogonal_fallback(const Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) < std::abs(v[best])) best = i;
  }
  Vec e(v.size(), 0.0);
  e[best] = 1.0;
  orthogonalize(e, v);
  normalize(e);
  return e;
}

void fix_sign(Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

PcaResult pca_project(const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() < 3) fail(ErrorCode::kInvalidArgument, "PCA needs at least 3 vectors");
  const std::size_t d = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != d) fail(ErrorCode::kDimensionMismatch, "vectors differ in dimension");
  }
  if (d < 2) fail(ErrorCode::kInvalidArgument, "PCA needs dimension >= 2");
  const std::size_t n = vectors.size();

  PcaResult result;
  result.mean.assign(d, 0.0);
  for (const auto& v : vectors) {
    for (std::size_t j = 0; j < d; ++j) result.mean[j] += v[j];
  }
  for (double& m : result.mean) m /= static_cast<double>(n);
  Mat centered(n, Vec(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[i][j] = vectors[i][j] - result.mean[j];
  }
  Mat cov(d, Vec(d, 0.0));
  for (const auto& row : centered) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) cov[a][b] += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a][b] /= static_cast<double>(n - 1);
      cov[b][a] = cov[a][b];
    }
  }
  const double scale = frobenius(cov);
  if (scale == 0.0) fail(ErrorCode::kDegenerateBatch, "all vectors are identical");

  Vec v1 = power_iteration(cov, start_vector(cov), nullptr);
  fix_sign(v1);
  const double lambda1 = dot(v1, multiply(cov, v1));

  Mat deflated = cov;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) deflated[a][b] -= lambda1 * v1[a] * v1[b];
  }
  Vec v2;
  if (frobenius(deflated) <= 1e-12 * scale) {
    v2 = orthogonal_fallback(v1);  // rank-1 data: any orthogonal direction
  } else {
    v2 = power_iteration(deflated, start_vector(deflated), &v1);
    orthogonalize(v2, v1);
    normalize(v2);
  }
  fix_sign(v2);

  result.components = {v1, v2};
  result.variances = {lambda1, std::max(0.0, dot(v2, multiply(cov, v2)))};
  for (const auto& row : centered) result.points.push_back({dot(row, v1), dot(row, v2)});
  return result;
}

}  // namespace spio
