#pragma once

#include <string>
#include <vector>

#include "spio/predictions.hpp"
#include "spio/types.hpp"

namespace spio {

// Per instance, the label maximizing the uniform mean probability across
// members; ties go to the earliest label. kLabelSetMismatch and
// kInstanceCountMismatch guard the inputs.
PredictionSet ensemble_soft_vote(const std::vector<ProbabilityMatrix>& matrices);

// Elementwise mean of regression predictions.
PredictionSet ensemble_mean(const std::vector<PredictionSet>& members);

// Combines realized members: soft vote for classification (label-only members
// become one-hot rows over the union of labels), mean for regression.
PredictionSet combine_members(const std::vector<PredictionSet>& members, TaskKind task_kind);

double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth);
double rmse(const std::vector<double>& predicted, const std::vector<double>& truth);
// Rank-sum AUC; tied scores count one half. kDegenerateTruth when only one
// class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

// ACC, ROC_AUC (probabilities vs. binary labels; the positive class is the
// second label in sorted order) or RMSE.
double score(Metric metric, const PredictionSet& predictions, const PredictionSet& truth);

}  // namespace spio
