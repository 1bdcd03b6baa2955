#include "dyadwatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "dyadwatch/error.hpp"
#include "dyadwatch/parallel.hpp"

namespace dyadwatch {

namespace {

void check_lengths(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ConfigError("scores and labels differ in length (" + std::to_string(scores.size()) + " vs " +
                      std::to_string(labels.size()) + ")");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw ConfigError("labels must be 0 or 1");
  }
}

std::vector<int> dataset_labels(const Dataset& d) {
  std::vector<int> out;
  out.reserve(d.size());
  for (const auto& r : d.records) out.push_back(r.outcome);
  return out;
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_lengths(scores, labels);
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
  ConfusionMatrix m;
  m.threshold = threshold;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool conflict = scores[i] > threshold;
    if (labels[i] == 1) {
      ++(conflict ? m.true_conflict : m.false_peace);
    } else {
      ++(conflict ? m.false_conflict : m.true_peace);
    }
  }
  return m;
}

TrueRates true_rates(const ConfusionMatrix& m) {
  const auto disputes = m.true_conflict + m.false_peace;
  const auto peace = m.true_peace + m.false_conflict;
  if (disputes == 0 || peace == 0) throw ConfigError("true rates need both classes present");
  return {static_cast<double>(m.true_conflict) / static_cast<double>(disputes),
          static_cast<double>(m.true_peace) / static_cast<double>(peace)};
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels, std::size_t max_thresholds) {
  check_lengths(scores, labels);
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("ROC scores contain NaN");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  const auto disputes = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto peace = labels.size() - disputes;
  if (disputes == 0 || peace == 0) throw ConfigError("ROC needs both classes present");

  // Unique scores with cumulative class counts at or below each one.
  struct Level {
    double score;
    std::size_t disputes_below;
    std::size_t peace_below;
  };
  std::vector<Level> levels;
  std::size_t d_acc = 0, p_acc = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = order[k];
    (labels[i] == 1 ? d_acc : p_acc)++;
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[i]) levels.push_back({scores[i], d_acc, p_acc});
  }
  levels.pop_back();  // the top level predicts everything as peace, same as +inf

  std::vector<std::size_t> picks(levels.size());
  std::iota(picks.begin(), picks.end(), 0);
  if (max_thresholds > 0 && levels.size() > max_thresholds) {
    picks.clear();
    for (std::size_t k = 0; k < max_thresholds; ++k) {
      const auto idx = max_thresholds == 1 ? levels.size() / 2
                                           : static_cast<std::size_t>(std::llround(
                                                 static_cast<double>(k) * static_cast<double>(levels.size() - 1) /
                                                 static_cast<double>(max_thresholds - 1)));
      if (picks.empty() || picks.back() != idx) picks.push_back(idx);
    }
  }

  const auto nd = static_cast<double>(disputes);
  const auto np = static_cast<double>(peace);
  RocCurve curve;
  curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  for (auto k : picks) {
    const auto& l = levels[k];
    curve.points.push_back(
        {l.score, static_cast<double>(disputes - l.disputes_below) / nd, static_cast<double>(l.peace_below) / np});
  }
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area += std::fabs(a.dispute_accuracy - b.dispute_accuracy) * 0.5 * (a.peace_accuracy + b.peace_accuracy);
  }
  return area;
}

// Trapezoids in integer counts with one division, so separated scores give exactly 1.
double auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("ROC scores contain NaN");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  const auto disputes = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto peace = labels.size() - disputes;
  if (disputes == 0 || peace == 0) throw ConfigError("ROC needs both classes present");

  std::uint64_t twice_area = 0, d_prev = 0, p_prev = 0, d_acc = 0, p_acc = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = order[k];
    (labels[i] == 1 ? d_acc : p_acc)++;
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[i]) {
      twice_area += (d_acc - d_prev) * (p_acc + p_prev);
      d_prev = d_acc;
      p_prev = p_acc;
    }
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(disputes) * static_cast<double>(peace));
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "threshold,dispute_acc,peace_acc\n";
  for (const auto& p : curve.points) {
    append_double(out, p.threshold);
    out += ',';
    append_double(out, p.dispute_accuracy);
    out += ',';
    append_double(out, p.peace_accuracy);
    out += '\n';
  }
  return out;
}

std::vector<double> train_and_score(const Dataset& train, const Dataset& test, std::span<const std::size_t> columns,
                                    const TrainRecipe& recipe) {
  if (columns.empty()) throw ConfigError("an input subset must not be empty");
  for (auto c : columns) {
    if (c >= kInputCount) throw ConfigError("input column index out of range");
  }
  if (train.schema != test.schema) throw ConfigError("train and test datasets use different schemas");
  const auto scaling = fit_scaling(train);
  const auto fit = scale_dataset(train, scaling).select_columns(columns);
  const auto eval = scale_dataset(test, scaling).select_columns(columns);
  const auto trained = train_network(fit, recipe);
  std::vector<double> scores;
  scores.reserve(eval.size());
  for (std::size_t n = 0; n < eval.size(); ++n) scores.push_back(trained.probability(eval.row(n)));
  return scores;
}

std::vector<OmissionRow> omission_study(const Dataset& train, const Dataset& test, const TrainRecipe& recipe,
                                        std::size_t threads) {
  const auto labels = dataset_labels(test);
  const auto names = train.schema.names();
  std::vector<OmissionRow> rows(kInputCount + 1);
  parallel_for(rows.size(), threads, [&](std::size_t r) {
    std::vector<std::size_t> columns;
    for (std::size_t i = 0; i < kInputCount; ++i) {
      if (r == 0 || i != r - 1) columns.push_back(i);
    }
    rows[r].omitted = r == 0 ? "None" : names[r - 1];
    try {
      rows[r].auc = auc(train_and_score(train, test, columns, recipe), labels);
    } catch (const Error& e) {
      rows[r].auc = std::numeric_limits<double>::quiet_NaN();
      rows[r].error = e.what();
    }
  });
  return rows;
}

std::string omission_csv(std::span<const OmissionRow> rows) {
  std::string out = "omitted,auc\n";
  for (const auto& r : rows) {
    out += r.omitted + ',';
    if (!r.error) append_double(out, r.auc);
    out += '\n';
  }
  return out;
}

SubsetComparison subset_compare(const Dataset& train, const Dataset& test, std::span<const std::size_t> subset_a,
                                std::span<const std::size_t> subset_b, const TrainRecipe& recipe) {
  const auto labels = dataset_labels(test);
  SubsetComparison out;
  out.a = roc(train_and_score(train, test, subset_a, recipe), labels);
  out.b = roc(train_and_score(train, test, subset_b, recipe), labels);
  out.auc_a = auc(out.a);
  out.auc_b = auc(out.b);
  return out;
}

std::vector<ScenarioOutcome> scenario_sweep(const Predictor& predictor) {
  const auto& schema = predictor.schema();
  const auto& scaling = predictor.scaling();
  InputVector lows{}, highs{};
  for (std::size_t i = 0; i < kInputCount; ++i) {
    lows[i] = schema[i].peace_min(scaling.low[i], scaling.high[i]);
    highs[i] = schema[i].peace_max(scaling.low[i], scaling.high[i]);
  }

  std::vector<ScenarioOutcome> out;
  auto add = [&](std::string label, const InputVector& raw) {
    ScenarioOutcome s;
    s.label = std::move(label);
    s.raw = raw;
    s.scaled = scaling.apply(raw);
    s.probability = predictor.predict_scaled(s.scaled).probability;
    s.conflict = s.probability > 0.5;
    out.push_back(std::move(s));
  };
  add("all-min", lows);
  add("all-max", highs);
  for (std::size_t i = 0; i < kInputCount; ++i) {
    InputVector v = lows;
    v[i] = highs[i];
    add(schema[i].name + "-max-rest-min", v);
  }
  for (std::size_t i = 0; i < kInputCount; ++i) {
    InputVector v = highs;
    v[i] = lows[i];
    add(schema[i].name + "-min-rest-max", v);
  }
  return out;
}

std::string scenario_csv(std::span<const ScenarioOutcome> outcomes) {
  std::string out = "scenario,probability,verdict\n";
  for (const auto& s : outcomes) {
    out += s.label + ',';
    append_double(out, s.probability);
    out += s.conflict ? ",conflict\n" : ",peace\n";
  }
  return out;
}

}  // namespace dyadwatch
