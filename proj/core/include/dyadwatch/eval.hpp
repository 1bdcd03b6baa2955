#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadwatch/dataset.hpp"
#include "dyadwatch/predictor.hpp"
#include "dyadwatch/training.hpp"

namespace dyadwatch {

// TC = true conflict, FP = false peace (dispute predicted as peace),
// TP = true peace, FC = false conflict.
struct ConfusionMatrix {
  std::size_t true_conflict = 0;
  std::size_t false_peace = 0;
  std::size_t true_peace = 0;
  std::size_t false_conflict = 0;
  double threshold = 0.5;

  std::size_t total() const noexcept { return true_conflict + false_peace + true_peace + false_conflict; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// A case is predicted conflict iff score > threshold.
ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct TrueRates {
  double true_positive_rate = 0.0;  // disputes correctly identified
  double true_negative_rate = 0.0;  // non-disputes correctly identified
};
TrueRates true_rates(const ConfusionMatrix& m);

// x = proportion of disputes predicted conflict, y = proportion of
// non-disputes predicted peace. Endpoints carry thresholds of -inf and +inf.
// The usual (FPR, TPR) curve is (1 - y, x).
struct RocPoint {
  double threshold = 0.0;
  double dispute_accuracy = 0.0;
  double peace_accuracy = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold
};

// Sweeps thresholds over the sorted unique scores; max_thresholds > 0 caps
// the interior points by quantile subsampling.
RocCurve roc(std::span<const double> scores, std::span<const int> labels, std::size_t max_thresholds = 0);
double auc(const RocCurve& curve);
double auc(std::span<const double> scores, std::span<const int> labels);

std::string roc_csv(const RocCurve& curve);  // threshold,dispute_acc,peace_acc

struct OmissionRow {
  std::string omitted;  // variable name, or "None" for the baseline
  double auc = 0.0;
  std::optional<std::string> error;
};

// Baseline row first, then one row per input with that input dropped. All
// rows share recipe.seed.
std::vector<OmissionRow> omission_study(const Dataset& train, const Dataset& test, const TrainRecipe& recipe,
                                        std::size_t threads = 1);
std::string omission_csv(std::span<const OmissionRow> rows);  // omitted,auc

struct SubsetComparison {
  RocCurve a;
  RocCurve b;
  double auc_a = 0.0;
  double auc_b = 0.0;
};

SubsetComparison subset_compare(const Dataset& train, const Dataset& test, std::span<const std::size_t> subset_a,
                                std::span<const std::size_t> subset_b, const TrainRecipe& recipe);

// Trains on the listed columns only and returns test probabilities.
std::vector<double> train_and_score(const Dataset& train, const Dataset& test, std::span<const std::size_t> columns,
                                    const TrainRecipe& recipe);

struct ScenarioOutcome {
  std::string label;
  InputVector raw{};
  InputVector scaled{};
  double probability = 0.0;
  bool conflict = false;  // probability > 0.5
};

// all-min, all-max, then <var>-max-rest-min and <var>-min-rest-max for each
// input. "max" is the peace-favoring end of each variable.
std::vector<ScenarioOutcome> scenario_sweep(const Predictor& predictor);
std::string scenario_csv(std::span<const ScenarioOutcome> outcomes);  // scenario,probability,verdict

}  // namespace dyadwatch
