#include <algorithm>
#include <set>

#include "spio/ensemble.hpp"
#include "spio/error.hpp"

namespace spio {

PredictionSet ensemble_soft_vote(const std::vector<ProbabilityMatrix>& matrices) {
  if (matrices.empty()) fail(ErrorCode::kInvalidArgument, "soft vote needs at least one member");
  const auto& first = matrices.front();
  for (const auto& m : matrices) {
    if (m.labels != first.labels) fail(ErrorCode::kLabelSetMismatch, "members disagree on the label set");
    if (m.rows.size() != first.rows.size()) {
      fail(ErrorCode::kInstanceCountMismatch, "members disagree on the instance count");
    }
    m.validate();
  }
  const double k = static_cast<double>(matrices.size());
  const std::size_t classes = first.labels.size();
  std::vector<std::string> out;
  out.reserve(first.rows.size());
  std::vector<double> mean(classes);
  for (std::size_t r = 0; r < first.rows.size(); ++r) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const auto& m : matrices) {
      for (std::size_t c = 0; c < classes; ++c) mean[c] += m.rows[r][c];
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      mean[c] /= k;
      if (mean[c] > mean[best]) best = c;
    }
    out.push_back(first.labels[best]);
  }
  return PredictionSet::from_labels(std::move(out));
}

PredictionSet ensemble_mean(const std::vector<PredictionSet>& members) {
  if (members.empty()) fail(ErrorCode::kInvalidArgument, "mean needs at least one member");
  const std::size_t n = members.front().values.size();
  std::vector<double> sum(n, 0.0);
  for (const auto& m : members) {
    if (m.kind != PredictionKind::kRegressionValues) {
      fail(ErrorCode::kMetricKindMismatch, "mean ensembling needs regression values");
    }
    if (m.values.size() != n) fail(ErrorCode::kInstanceCountMismatch, "members disagree on the instance count");
    for (std::size_t i = 0; i < n; ++i) sum[i] += m.values[i];
  }
  for (double& v : sum) v /= static_cast<double>(members.size());
  return PredictionSet::from_values(std::move(sum));
}

PredictionSet combine_members(const std::vector<PredictionSet>& members, TaskKind task_kind) {
  if (!is_classification(task_kind)) return ensemble_mean(members);
  if (members.empty()) fail(ErrorCode::kInvalidArgument, "nothing to combine");
  std::set<std::string> label_union;
  bool any_labels = false;
  for (const auto& m : members) {
    if (m.kind == PredictionKind::kClassLabels) {
      any_labels = true;
      label_union.insert(m.labels.begin(), m.labels.end());
    } else if (m.kind == PredictionKind::kClassProbabilities) {
      label_union.insert(m.probabilities.labels.begin(), m.probabilities.labels.end());
    } else {
      fail(ErrorCode::kMetricKindMismatch, "classification members must carry labels or probabilities");
    }
  }
  std::vector<ProbabilityMatrix> matrices;
  const std::vector<std::string> labels(label_union.begin(), label_union.end());
  for (const auto& m : members) {
    if (m.kind == PredictionKind::kClassProbabilities) {
      if (any_labels && m.probabilities.labels != labels) {
        fail(ErrorCode::kLabelSetMismatch, "probability member lacks labels predicted by another member");
      }
      matrices.push_back(m.probabilities);
      continue;
    }
    ProbabilityMatrix onehot;
    onehot.labels = labels;
    for (const auto& label : m.labels) {
      std::vector<double> row(labels.size(), 0.0);
      row[static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), label) - labels.begin())] = 1.0;
      onehot.rows.push_back(std::move(row));
    }
    matrices.push_back(std::move(onehot));
  }
  return ensemble_soft_vote(matrices);
}

}  // namespace spio
