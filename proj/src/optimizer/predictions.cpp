#include "spio/predictions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "spio/dataset.hpp"
#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

double parse_number(std::string_view text, const std::filesystem::path& path) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
    fail(ErrorCode::kFormatError, path.string() + ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t argmax(const std::vector<double>& row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

}  // namespace

void ProbabilityMatrix::validate() const {
  if (labels.empty()) fail(ErrorCode::kInvalidArgument, "probability matrix has no labels");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != labels.size()) {
      fail(ErrorCode::kInvalidArgument, "row " + std::to_string(r) + " has the wrong number of classes");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidArgument, "probability outside [0,1] in row " + std::to_string(r));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(ErrorCode::kInvalidArgument, "row " + std::to_string(r) + " does not sum to 1");
  }
}

std::string_view prediction_kind_name(PredictionKind k) {
  switch (k) {
    case PredictionKind::kClassLabels: return "class_labels";
    case PredictionKind::kClassProbabilities: return "class_probabilities";
    case PredictionKind::kRegressionValues: return "regression_values";
  }
  return "";
}

std::size_t PredictionSet::instance_count() const {
  switch (kind) {
    case PredictionKind::kClassLabels: return labels.size();
    case PredictionKind::kClassProbabilities: return probabilities.rows.size();
    case PredictionKind::kRegressionValues: return values.size();
  }
  return 0;
}

PredictionSet PredictionSet::from_labels(std::vector<std::string> labels) {
  PredictionSet p;
  p.kind = PredictionKind::kClassLabels;
  p.labels = std::move(labels);
  return p;
}

PredictionSet PredictionSet::from_values(std::vector<double> values) {
  PredictionSet p;
  p.kind = PredictionKind::kRegressionValues;
  p.values = std::move(values);
  return p;
}

PredictionSet PredictionSet::from_probabilities(ProbabilityMatrix matrix) {
  matrix.validate();
  PredictionSet p;
  p.kind = PredictionKind::kClassProbabilities;
  p.probabilities = std::move(matrix);
  return p;
}

PredictionSet read_predictions(const std::filesystem::path& path, TaskKind task_kind) {
  const CsvTable table = read_csv(path);
  if (is_classification(task_kind)) {
    std::vector<std::pair<std::string, std::size_t>> proba;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const auto& name = table.header[c];
      if (name.size() > kProbaPrefix.size() && name.starts_with(kProbaPrefix)) {
        proba.emplace_back(name.substr(kProbaPrefix.size()), c);
      }
    }
    if (!proba.empty()) {
      std::sort(proba.begin(), proba.end());
      ProbabilityMatrix m;
      for (const auto& [label, column] : proba) m.labels.push_back(label);
      for (const auto& row : table.rows) {
        std::vector<double> p;
        for (const auto& [label, column] : proba) {
          const double v = parse_number(row[column], path);
          if (v < 0.0) fail(ErrorCode::kFormatError, path.string() + ": negative probability");
          p.push_back(v);
        }
        // Written files round probabilities; rescale rows to sum to one.
        const double sum = std::accumulate(p.begin(), p.end(), 0.0);
        if (!(sum > 0.0)) fail(ErrorCode::kFormatError, path.string() + ": probability row sums to zero");
        for (double& v : p) v = std::min(1.0, v / sum);
        m.rows.push_back(std::move(p));
      }
      return PredictionSet::from_probabilities(std::move(m));
    }
  }
  const auto column = table.column(kPredictionColumn);
  if (!column) {
    fail(ErrorCode::kFormatError, path.string() + ": no '" + std::string(kPredictionColumn) + "' or '" +
                                      std::string(kProbaPrefix) + "<label>' columns");
  }
  if (is_classification(task_kind)) {
    std::vector<std::string> labels;
    for (const auto& row : table.rows) labels.emplace_back(trim(row[*column]));
    return PredictionSet::from_labels(std::move(labels));
  }
  std::vector<double> values;
  for (const auto& row : table.rows) values.push_back(parse_number(row[*column], path));
  return PredictionSet::from_values(std::move(values));
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& predictions) {
  CsvTable table;
  switch (predictions.kind) {
    case PredictionKind::kClassLabels:
      table.header = {std::string(kPredictionColumn)};
      for (const auto& label : predictions.labels) table.rows.push_back({label});
      break;
    case PredictionKind::kRegressionValues:
      table.header = {std::string(kPredictionColumn)};
      for (double v : predictions.values) table.rows.push_back({format_double(v)});
      break;
    case PredictionKind::kClassProbabilities:
      for (const auto& label : predictions.probabilities.labels) {
        table.header.push_back(std::string(kProbaPrefix) + label);
      }
      for (const auto& row : predictions.probabilities.rows) {
        std::vector<std::string> cells;
        for (double v : row) cells.push_back(format_double(v));
        table.rows.push_back(std::move(cells));
      }
      break;
  }
  write_csv(path, table);
}

std::vector<std::string> predicted_labels(const PredictionSet& predictions) {
  if (predictions.kind == PredictionKind::kClassLabels) return predictions.labels;
  if (predictions.kind == PredictionKind::kRegressionValues) {
    fail(ErrorCode::kMetricKindMismatch, "regression values have no class labels");
  }
  std::vector<std::string> out;
  const auto& m = predictions.probabilities;
  for (const auto& row : m.rows) out.push_back(m.labels[argmax(row)]);
  return out;
}

}  // namespace spio
