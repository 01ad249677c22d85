#include "spio/split.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "spio/error.hpp"

namespace spio {

namespace {

// Uniform in [0, bound) without modulo bias.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace

std::string_view split_kind_name(SplitKind k) {
  return k == SplitKind::kHoldout70_30 ? "holdout_70_30" : "three_way_70_10_20";
}

SplitKind parse_split_kind(std::string_view name) {
  if (name == "holdout_70_30") return SplitKind::kHoldout70_30;
  if (name == "three_way_70_10_20") return SplitKind::kThreeWay70_10_20;
  fail(ErrorCode::kConfigError, "unknown split scheme '" + std::string(name) + "'");
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Partition split(std::size_t row_count, const SplitScheme& scheme) {
  if (row_count < 10) fail(ErrorCode::kTooFewRows, "need at least 10 rows, got " + std::to_string(row_count));
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  if (scheme.kind == SplitKind::kHoldout70_30) {
    n_val = row_count * 3 / 10;
  } else {
    n_val = row_count / 10;
    n_test = row_count * 2 / 10;
  }
  const std::size_t n_train = row_count - n_val - n_test;
  const auto order = seeded_permutation(row_count, scheme.seed);

  Partition p;
  p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  p.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  for (auto* part : {&p.train, &p.validation, &p.test}) std::sort(part->begin(), part->end());
  return p;
}

}  // namespace spio
