#include "dyadwatch/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

Prediction predictive(const MlpModel& model, std::span<const double> scaled_input) {
  const double p = predict_probability(model.arch, model.weights, scaled_input);
  return {p, 2.0 * std::abs(p - 0.5)};
}

Prediction predictive(const PosteriorEnsemble& ensemble, std::span<const double> scaled_input) {
  if (ensemble.samples.empty()) throw ConfigError("ensemble has no samples");
  std::vector<double> outputs;
  outputs.reserve(ensemble.samples.size());
  for (const auto& w : ensemble.samples) outputs.push_back(predict_probability(ensemble.arch, w, scaled_input));
  const double n = static_cast<double>(outputs.size());
  double mean = 0.0;
  for (double p : outputs) mean += p;
  mean /= n;
  double var = 0.0;
  for (double p : outputs) var += (p - mean) * (p - mean);
  const double sd = std::sqrt(var / n);
  return {std::clamp(mean, 0.0, 1.0), std::max(0.0, 1.0 - 2.0 * sd)};
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::map_evidence ? "map_evidence" : "hmc_ensemble";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "map_evidence") return ModelKind::map_evidence;
  if (name == "hmc_ensemble") return ModelKind::hmc_ensemble;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

Predictor::Predictor(Network network, ScalingParams scaling, VariableSchema schema)
    : network_(std::move(network)), scaling_(scaling), schema_(std::move(schema)) {
  const auto& arch = architecture();
  arch.validate();
  if (arch.inputs != schema_.size()) throw ConfigError("network inputs do not match the schema");
  if (const auto* e = std::get_if<PosteriorEnsemble>(&network_)) {
    if (e->samples.empty()) throw ConfigError("ensemble has no samples");
    for (const auto& w : e->samples) {
      if (w.size() != arch.weight_count()) throw ConfigError("ensemble sample has the wrong length");
    }
  } else if (std::get<MlpModel>(network_).weights.size() != arch.weight_count()) {
    throw ConfigError("model weights have the wrong length");
  }
  for (std::size_t i = 0; i < kInputCount; ++i) {
    if (!(scaling_.high[i] > scaling_.low[i])) throw ConfigError("scaling range is empty for " + schema_[i].name);
  }
}

ModelKind Predictor::kind() const noexcept {
  return std::holds_alternative<MlpModel>(network_) ? ModelKind::map_evidence : ModelKind::hmc_ensemble;
}

const MlpArchitecture& Predictor::architecture() const noexcept {
  return std::visit([](const auto& n) -> const MlpArchitecture& { return n.arch; }, network_);
}

Prediction Predictor::predict_scaled(std::span<const double> scaled_input) const {
  return std::visit([&](const auto& n) { return predictive(n, scaled_input); }, network_);
}

Prediction Predictor::predict(const InputVector& raw) const {
  const auto scaled = scaling_.apply(raw);
  return predict_scaled(scaled);
}

std::vector<double> Predictor::probabilities(const Dataset& dataset) const {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& r : dataset.records) out.push_back(predict(r).probability);
  return out;
}

}  // namespace dyadwatch
