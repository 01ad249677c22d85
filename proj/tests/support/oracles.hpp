#pragma once

#include <random>
#include <string>
#include <vector>

#include "spio/analytics.hpp"
#include "spio/predictions.hpp"

namespace spio::testing {

// Probability rows are integer counts over this denominator, so sums are
// exact and ties are real ties.
inline constexpr int kVoteDenominator = 8;

struct VoteCase {
  std::vector<ProbabilityMatrix> members;
  std::vector<std::vector<std::vector<int>>> counts;  // [member][row][class]
};

// k <= 4 members, |C| <= 5 classes, n <= 50 rows.
VoteCase random_vote_case(std::mt19937_64& rng);

// Argmax of the integer count sums; ties go to the earliest label.
std::vector<std::string> brute_force_vote(const VoteCase& c);

// Mean by long double accumulation over members in reverse order.
std::vector<double> brute_force_mean(const std::vector<std::vector<double>>& members);

double naive_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth);
double naive_rmse(const std::vector<double>& predicted, const std::vector<double>& truth);

// O(n^2) over positive/negative pairs; ties count one half.
double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

// Share of traces without success within k attempts, by direct counting.
double counted_failure_rate(const std::vector<AttemptTrace>& traces, int k);

// Traces 1x8, 2x2, 4x1 and one that never succeeds.
std::vector<AttemptTrace> twelve_traces();

}  // namespace spio::testing
