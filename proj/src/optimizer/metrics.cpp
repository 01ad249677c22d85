#include <algorithm>
#include <cmath>
#include <numeric>

#include "spio/ensemble.hpp"
#include "spio/error.hpp"

namespace spio {

namespace {

void check_counts(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kInstanceCountMismatch,
         "predictions have " + std::to_string(a) + " rows, truth has " + std::to_string(b));
  }
  if (a == 0) fail(ErrorCode::kInvalidArgument, "no instances to score");
}

}  // namespace

double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
  check_counts(predicted.size(), truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double rmse(const std::vector<double>& predicted, const std::vector<double>& truth) {
  check_counts(predicted.size(), truth.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = predicted[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_counts(scores.size(), positive.size());
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorCode::kDegenerateTruth, "ROC_AUC needs both classes in the truth");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double score(Metric metric, const PredictionSet& predictions, const PredictionSet& truth) {
  switch (metric) {
    case Metric::kAcc: {
      if (truth.kind != PredictionKind::kClassLabels) fail(ErrorCode::kMetricKindMismatch, "ACC needs label truth");
      return accuracy(predicted_labels(predictions), truth.labels);
    }
    case Metric::kRmse: {
      if (predictions.kind != PredictionKind::kRegressionValues || truth.kind != PredictionKind::kRegressionValues) {
        fail(ErrorCode::kMetricKindMismatch, "RMSE needs regression values");
      }
      return rmse(predictions.values, truth.values);
    }
    case Metric::kRocAuc: {
      if (predictions.kind != PredictionKind::kClassProbabilities || truth.kind != PredictionKind::kClassLabels) {
        fail(ErrorCode::kMetricKindMismatch, "ROC_AUC needs probabilities and label truth");
      }
      const auto& m = predictions.probabilities;
      if (m.labels.size() != 2) fail(ErrorCode::kMetricKindMismatch, "ROC_AUC needs exactly two classes");
      check_counts(m.rows.size(), truth.labels.size());
      std::vector<double> scores;
      std::vector<bool> positive;
      for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const auto& label = truth.labels[i];
        if (label != m.labels[0] && label != m.labels[1]) {
          fail(ErrorCode::kLabelSetMismatch, "truth label '" + label + "' is not a predicted class");
        }
        scores.push_back(m.rows[i][1]);
        positive.push_back(label == m.labels[1]);
      }
      return roc_auc(scores, positive);
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown metric");
}

}  // namespace spio
