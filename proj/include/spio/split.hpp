#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace spio {

enum class SplitKind { kHoldout70_30, kThreeWay70_10_20 };
std::string_view split_kind_name(SplitKind k);  // "holdout_70_30", "three_way_70_10_20"
SplitKind parse_split_kind(std::string_view name);

struct SplitScheme {
  SplitKind kind = SplitKind::kHoldout70_30;
  std::uint64_t seed = 0;
};

// Row indices per partition, each sorted ascending. `test` stays empty for
// the holdout scheme.
struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  bool operator==(const Partition&) const = default;
};

// Seeded shuffle, then floor-sized validation/test parts; the remainder goes
// to train. kTooFewRows below 10 rows.
Partition split(std::size_t row_count, const SplitScheme& scheme);

// Fisher-Yates permutation of 0..n-1 driven by mt19937_64 with rejection
// sampling, so the order is identical on every standard library.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace spio
