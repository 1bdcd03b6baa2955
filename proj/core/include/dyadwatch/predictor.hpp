#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadwatch/bayes.hpp"
#include "dyadwatch/dataset.hpp"
#include "dyadwatch/mlp.hpp"

namespace dyadwatch {

// A single network, typically the MAP weights of an evidence run.
struct MlpModel {
  MlpArchitecture arch;
  WeightVector weights;

  bool operator==(const MlpModel&) const = default;
};

struct Prediction {
  double probability = 0.5;
  double confidence = 0.0;
};

// Single model: confidence = 2|p - 0.5|.
Prediction predictive(const MlpModel& model, std::span<const double> scaled_input);
// Ensemble: p = mean output, confidence = max(0, 1 - 2 * population std).
Prediction predictive(const PosteriorEnsemble& ensemble, std::span<const double> scaled_input);

enum class ModelKind { map_evidence, hmc_ensemble };
std::string_view to_string(ModelKind kind) noexcept;
ModelKind model_kind_from_string(std::string_view name);

// A trained network (or ensemble) with the scaling it was fitted under.
class Predictor {
 public:
  using Network = std::variant<MlpModel, PosteriorEnsemble>;

  Predictor(Network network, ScalingParams scaling, VariableSchema schema = VariableSchema::standard());

  ModelKind kind() const noexcept;
  const MlpArchitecture& architecture() const noexcept;
  const Network& network() const noexcept { return network_; }
  const ScalingParams& scaling() const noexcept { return scaling_; }
  const VariableSchema& schema() const noexcept { return schema_; }

  const std::optional<ArdResult>& ard() const noexcept { return ard_; }
  void set_ard(ArdResult ard) { ard_ = std::move(ard); }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  void set_alphas(std::vector<double> alphas) { alphas_ = std::move(alphas); }

  Prediction predict_scaled(std::span<const double> scaled_input) const;
  Prediction predict(const InputVector& raw) const;
  Prediction predict(const DyadYearRecord& record) const { return predict(record.values); }

  std::vector<double> probabilities(const Dataset& dataset) const;

  bool operator==(const Predictor&) const = default;

 private:
  Network network_;
  ScalingParams scaling_;
  VariableSchema schema_;
  std::optional<ArdResult> ard_;
  std::vector<double> alphas_;
};

}  // namespace dyadwatch
