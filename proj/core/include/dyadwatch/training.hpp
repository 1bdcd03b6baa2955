#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dyadwatch/bayes.hpp"
#include "dyadwatch/predictor.hpp"

namespace dyadwatch {

enum class TrainMethod { evidence, hmc, ard };

std::string_view to_string(TrainMethod m) noexcept;
TrainMethod train_method_from_string(std::string_view name);

// Defaults match the architecture the GA settles on for the dyadic data:
// 10 tanh hidden units, logistic output.
struct TrainRecipe {
  TrainMethod method = TrainMethod::evidence;
  MlpArchitecture arch{.hidden = 10};
  EvidenceConfig evidence;
  HmcConfig hmc{.step_size = 0.02, .leapfrog_steps = 40, .samples = 60, .burn_in = 40, .thinning = 2};
  std::uint64_t seed = 0;
};

// Result of training on an already-scaled design matrix.
struct TrainedNetwork {
  Predictor::Network network;
  std::vector<double> alphas;
  std::optional<EvidenceResult> evidence;  // MAP run (warm start for hmc)

  double probability(std::span<const double> scaled_input) const;
};

// The architecture's input count is taken from data.inputs.
TrainedNetwork train_network(const ScaledData& data, const TrainRecipe& recipe);

// Fits scaling on `train`, trains, and attaches the ARD sidecar when the run
// used per-input groups (method ard, or hmc whose warm start is an ARD run).
Predictor train_predictor(const Dataset& train, const TrainRecipe& recipe);

}  // namespace dyadwatch
