#include "dyadwatch/training.hpp"

#include "dyadwatch/error.hpp"

namespace dyadwatch {

std::string_view to_string(TrainMethod m) noexcept {
  switch (m) {
    case TrainMethod::evidence: return "evidence";
    case TrainMethod::hmc: return "hmc";
    case TrainMethod::ard: return "ard";
  }
  return "unknown";
}

TrainMethod train_method_from_string(std::string_view name) {
  if (name == "evidence") return TrainMethod::evidence;
  if (name == "hmc") return TrainMethod::hmc;
  if (name == "ard") return TrainMethod::ard;
  throw ConfigError("unknown training method '" + std::string(name) + "'");
}

double TrainedNetwork::probability(std::span<const double> scaled_input) const {
  return std::visit([&](const auto& n) { return predictive(n, scaled_input).probability; }, network);
}

TrainedNetwork train_network(const ScaledData& data, const TrainRecipe& recipe) {
  MlpArchitecture arch = recipe.arch;
  arch.inputs = data.inputs;
  EvidenceConfig evidence = recipe.evidence;
  if (recipe.method == TrainMethod::ard) evidence.groups = GroupLayout::ard;

  auto map = evidence_train(arch, data, evidence, recipe.seed);
  TrainedNetwork out{MlpModel{arch, map.weights}, map.prior.alphas, std::nullopt};
  if (recipe.method == TrainMethod::hmc) {
    HmcConfig hmc = recipe.hmc;
    hmc.seed = recipe.seed;
    // Prior alphas stay fixed at the warm-start values while sampling.
    out.network = hmc_sample(arch, data, map.prior, hmc, map.weights);
  }
  out.evidence = std::move(map);
  return out;
}

Predictor train_predictor(const Dataset& train, const TrainRecipe& recipe) {
  if (train.count(0) == 0 || train.count(1) == 0) throw ConfigError("training data must contain both outcomes");
  const auto scaling = fit_scaling(train);
  const auto data = scale_dataset(train, scaling);
  auto trained = train_network(data, recipe);
  Predictor predictor(std::move(trained.network), scaling, train.schema);
  predictor.set_alphas(trained.alphas);
  const bool per_input_groups = recipe.method == TrainMethod::ard || recipe.evidence.groups == GroupLayout::ard;
  if (trained.evidence && per_input_groups) {
    predictor.set_ard(ard_summary(*trained.evidence, train.schema.names()));
  }
  return predictor;
}

}  // namespace dyadwatch
