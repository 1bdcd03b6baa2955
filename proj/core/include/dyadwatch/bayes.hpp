#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadwatch/hmc.hpp"
#include "dyadwatch/mlp.hpp"
#include "dyadwatch/scg.hpp"

namespace dyadwatch {

struct EvidenceConfig {
  std::size_t outer_iterations = 8;
  double initial_alpha = 0.01;
  double beta = 1.0;
  GroupLayout groups = GroupLayout::layered;
  double alpha_tolerance = 1e-3;  // relative change that counts as converged
  double init_scale = 1.0;
  ScgLimits inner{.max_iterations = 150};

  void validate() const;
};

// Bounds keeping alpha strictly positive and finite when a group collapses.
inline constexpr double kMinAlpha = 1e-8;
inline constexpr double kMaxAlpha = 1e8;

struct EvidenceIteration {
  std::vector<double> alphas;  // alphas used for this iteration's weight fit
  std::vector<double> gammas;  // effective parameter counts after the fit
  double objective = 0.0;
  double weight_norm = 0.0;
};

struct EvidenceResult {
  MlpArchitecture arch;
  WeightVector weights;
  ObjectiveConfig prior;             // final alphas and grouping
  std::vector<double> gammas;
  std::vector<std::size_t> group_sizes;
  std::vector<EvidenceIteration> trace;
  bool converged = false;
};

// Gauss-Newton Hessian of the cross-entropy data term, W x W row-major.
std::vector<double> data_hessian(const MlpArchitecture& arch, std::span<const double> weights,
                                 const ScaledData& data, double beta = 1.0);

struct AlphaUpdate {
  std::vector<double> alphas;
  std::vector<double> gammas;
};

// gamma_g = n_g - alpha_g * trace_g((H + diag(alpha))^-1), with H's eigenvalues
// floored at zero; alpha_g <- gamma_g / sum_{w in g} w^2. For a single group
// this is gamma = sum_i lambda_i / (lambda_i + alpha).
AlphaUpdate reestimate_alphas(std::span<const double> hessian, std::span<const double> weights,
                              const ObjectiveConfig& prior);

// alpha = gamma / sum of squared weights, clamped to [kMinAlpha, kMaxAlpha].
double alpha_from_gamma(double gamma, double sum_squares) noexcept;

EvidenceResult evidence_train(const MlpArchitecture& arch, const ScaledData& train,
                              const EvidenceConfig& config, std::uint64_t seed,
                              std::optional<WeightVector> initial = std::nullopt);

struct ArdResult {
  std::vector<std::string> inputs;   // variable names, schema order
  std::vector<double> input_alphas;
  std::vector<double> shared_alphas;  // hidden biases, second-layer weights, output biases
  std::vector<double> relevance;      // 1 / alpha per input
  std::vector<std::size_t> ranking;   // input indices by descending relevance

  bool operator==(const ArdResult&) const = default;
};

ArdResult ard_summary(const EvidenceResult& result, std::vector<std::string> input_names);
ArdResult ard_train(const MlpArchitecture& arch, const ScaledData& train, EvidenceConfig config,
                    std::uint64_t seed, std::vector<std::string> input_names);

struct PosteriorEnsemble {
  MlpArchitecture arch;
  std::vector<WeightVector> samples;
  double acceptance_rate = 0.0;
  std::size_t divergent = 0;
  HmcConfig config;

  bool operator==(const PosteriorEnsemble&) const = default;
};

PosteriorEnsemble hmc_sample(const MlpArchitecture& arch, const ScaledData& train,
                             const ObjectiveConfig& prior, const HmcConfig& config,
                             WeightVector initial);

}  // namespace dyadwatch
