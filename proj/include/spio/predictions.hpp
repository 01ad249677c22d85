#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spio/types.hpp"

namespace spio {

// Per-instance class probabilities over an ordered label set.
struct ProbabilityMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;

  bool operator==(const ProbabilityMatrix&) const = default;
  // Rows must have |labels| entries in [0,1] summing to 1 within 1e-9.
  void validate() const;
};

enum class PredictionKind { kClassLabels, kClassProbabilities, kRegressionValues };
std::string_view prediction_kind_name(PredictionKind k);

struct PredictionSet {
  PredictionKind kind = PredictionKind::kClassLabels;
  std::vector<std::string> labels;  // kClassLabels
  std::vector<double> values;       // kRegressionValues
  ProbabilityMatrix probabilities;  // kClassProbabilities

  bool operator==(const PredictionSet&) const = default;
  std::size_t instance_count() const;

  static PredictionSet from_labels(std::vector<std::string> labels);
  static PredictionSet from_values(std::vector<double> values);
  static PredictionSet from_probabilities(ProbabilityMatrix matrix);
};

inline constexpr std::string_view kProbaPrefix = "proba_";
inline constexpr std::string_view kPredictionColumn = "prediction";

// Reads a prediction file. Classification files with `proba_<label>` columns
// give probabilities (labels sorted, rows renormalized to sum to 1); otherwise
// the `prediction` column gives labels or, for regression, values.
PredictionSet read_predictions(const std::filesystem::path& path, TaskKind task_kind);
void write_predictions(const std::filesystem::path& path, const PredictionSet& predictions);

// Label-per-instance view: argmax (first label on ties) for probabilities.
std::vector<std::string> predicted_labels(const PredictionSet& predictions);

}  // namespace spio
