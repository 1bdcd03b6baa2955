#include "dyadwatch/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

double activation_slope(Activation a, double value) {
  switch (a) {
    case Activation::linear: return 1.0;
    case Activation::logistic: return value * (1.0 - value);
    case Activation::tanh: return 1.0 - value * value;
    case Activation::softmax: return value * (1.0 - value);
  }
  return 1.0;
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::linear: return x;
    case Activation::tanh: return std::tanh(x);
    default: return logistic(x);
  }
}

// Gauss-Newton weight (dp/da)^2 / (p (1 - p)) of the cross-entropy for each
// output activation, expressed through the unit's output y.
double output_curvature(Activation a, double y) {
  switch (a) {
    case Activation::logistic:
    case Activation::softmax: return y * (1.0 - y);
    case Activation::tanh: return 1.0 - y * y;
    case Activation::linear: {
      if (!(y > kProbabilityClamp && y < 1.0 - kProbabilityClamp)) return 0.0;
      return 1.0 / (y * (1.0 - y));
    }
  }
  return 0.0;
}

double sum_squares(std::span<const double> w, const ObjectiveConfig& prior, std::size_t group) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (prior.group_of[i] == group) s += w[i] * w[i];
  }
  return s;
}

}  // namespace

void EvidenceConfig::validate() const {
  if (!(initial_alpha > 0.0)) throw ConfigError("initial alpha must be positive");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(alpha_tolerance > 0.0)) throw ConfigError("alpha tolerance must be positive");
  if (inner.max_iterations < 1) throw ConfigError("inner SCG iterations must be positive");
}

std::vector<double> data_hessian(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
                                 double beta) {
  if (arch.outputs != 1) throw ConfigError("evidence Hessian supports a single output unit");
  if (data.inputs != arch.inputs) throw ConfigError("dataset width does not match architecture inputs");
  const WeightLayout L(arch);
  const std::size_t W = arch.weight_count();
  Eigen::MatrixXd jac(data.size(), W);
  Eigen::VectorXd curvature(data.size());
  std::vector<double> hidden(arch.hidden);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto x = data.row(n);
    double a_out = weights[L.b2(0)];
    for (std::size_t j = 0; j < arch.hidden; ++j) {
      double a = weights[L.b1(j)];
      for (std::size_t i = 0; i < arch.inputs; ++i) a += weights[L.w1(j, i)] * x[i];
      hidden[j] = activate(arch.hidden_activation, a);
      a_out += weights[L.w2(0, j)] * hidden[j];
    }
    const double y = activate(arch.output_activation, a_out);
    curvature(static_cast<Eigen::Index>(n)) = beta * output_curvature(arch.output_activation, y);
    auto row = jac.row(static_cast<Eigen::Index>(n));
    row(static_cast<Eigen::Index>(L.b2(0))) = 1.0;
    for (std::size_t j = 0; j < arch.hidden; ++j) {
      row(static_cast<Eigen::Index>(L.w2(0, j))) = hidden[j];
      const double back = weights[L.w2(0, j)] * activation_slope(arch.hidden_activation, hidden[j]);
      row(static_cast<Eigen::Index>(L.b1(j))) = back;
      for (std::size_t i = 0; i < arch.inputs; ++i) row(static_cast<Eigen::Index>(L.w1(j, i))) = back * x[i];
    }
  }
  const Eigen::MatrixXd product = jac.transpose() * curvature.asDiagonal() * jac;
  // Mirror the lower triangle so the result is exactly symmetric.
  const Eigen::MatrixXd h = product.selfadjointView<Eigen::Lower>();
  std::vector<double> out(W * W);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out.data(),
                                                                                      static_cast<Eigen::Index>(W),
                                                                                      static_cast<Eigen::Index>(W)) = h;
  return out;
}

double alpha_from_gamma(double gamma, double sum_sq) noexcept {
  if (!(sum_sq > 0.0)) return kMaxAlpha;
  return std::clamp(gamma / sum_sq, kMinAlpha, kMaxAlpha);
}

AlphaUpdate reestimate_alphas(std::span<const double> hessian, std::span<const double> weights,
                              const ObjectiveConfig& prior) {
  const auto W = static_cast<Eigen::Index>(weights.size());
  if (hessian.size() != weights.size() * weights.size()) throw ConfigError("Hessian size does not match weights");
  prior.validate(weights.size());
  for (double v : hessian) {
    if (!std::isfinite(v)) throw NumericError("Hessian has non-finite entries");
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> h(hessian.data(), W,
                                                                                                   W);
  const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("Hessian eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);

  const auto sizes = prior.group_sizes();
  AlphaUpdate update;
  update.gammas.assign(prior.group_count(), 0.0);
  update.alphas.assign(prior.group_count(), 0.0);

  if (prior.group_count() == 1) {
    const double alpha = std::max(prior.alphas[0], kMinAlpha);
    update.gammas[0] = (lambda.array() / (lambda.array() + alpha)).sum();
  } else {
    // Diagonal of (H+ + diag(alpha))^-1 with H+ the eigenvalue-floored Hessian.
    Eigen::VectorXd alpha_diag(W);
    for (Eigen::Index i = 0; i < W; ++i) {
      alpha_diag(i) = std::max(prior.alphas[prior.group_of[static_cast<std::size_t>(i)]], kMinAlpha);
    }
    Eigen::MatrixXd a = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    a.diagonal() += alpha_diag;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw NumericError("regularized Hessian is singular");
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(W, W));
    std::vector<double> trace(prior.group_count(), 0.0);
    for (Eigen::Index i = 0; i < W; ++i) trace[prior.group_of[static_cast<std::size_t>(i)]] += inv(i, i);
    for (std::size_t g = 0; g < prior.group_count(); ++g) {
      update.gammas[g] = static_cast<double>(sizes[g]) - std::max(prior.alphas[g], kMinAlpha) * trace[g];
    }
  }
  for (std::size_t g = 0; g < prior.group_count(); ++g) {
    update.gammas[g] = std::clamp(update.gammas[g], 0.0, static_cast<double>(sizes[g]));
    update.alphas[g] = alpha_from_gamma(update.gammas[g], sum_squares(weights, prior, g));
  }
  return update;
}

EvidenceResult evidence_train(const MlpArchitecture& arch, const ScaledData& train, const EvidenceConfig& config,
                              std::uint64_t seed, std::optional<WeightVector> initial) {
  arch.validate();
  config.validate();
  if (train.size() == 0) throw ConfigError("evidence training needs a non-empty dataset");

  EvidenceResult result;
  result.arch = arch;
  result.prior = make_objective_config(arch, config.groups, config.initial_alpha, config.beta);
  result.group_sizes = result.prior.group_sizes();
  WeightVector w = initial ? std::move(*initial) : init_weights(arch, seed, config.init_scale);
  if (w.size() != arch.weight_count()) throw ConfigError("initial weights do not match the architecture");

  for (std::size_t it = 0; it < std::max<std::size_t>(config.outer_iterations, 1); ++it) {
    const auto bound = bind_objective(arch, train, result.prior);
    auto fit = scg_minimize(bound.value, bound.gradient, std::move(w), config.inner);
    w = std::move(fit.weights);

    const auto hessian = data_hessian(arch, w, train, config.beta);
    AlphaUpdate update;
    try {
      update = reestimate_alphas(hessian, w, result.prior);
    } catch (const NumericError& e) {
      throw NumericError("evidence iteration " + std::to_string(it) + ": " + e.what());
    }

    EvidenceIteration record;
    record.alphas = result.prior.alphas;
    record.gammas = update.gammas;
    record.objective = fit.value;
    record.weight_norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    result.trace.push_back(std::move(record));

    bool converged = true;
    for (std::size_t g = 0; g < update.alphas.size(); ++g) {
      const double old = result.prior.alphas[g];
      if (std::abs(update.alphas[g] - old) > config.alpha_tolerance * old) converged = false;
    }
    result.prior.alphas = update.alphas;
    result.gammas = update.gammas;
    if (converged) {
      result.converged = true;
      break;
    }
  }
  result.weights = std::move(w);
  return result;
}

ArdResult ard_summary(const EvidenceResult& result, std::vector<std::string> input_names) {
  const std::size_t d = result.arch.inputs;
  if (result.prior.group_count() != d + 3) throw ConfigError("evidence run did not use per-input groups");
  if (input_names.size() != d) throw ConfigError("need one name per input");
  ArdResult ard;
  ard.inputs = std::move(input_names);
  ard.input_alphas.assign(result.prior.alphas.begin(), result.prior.alphas.begin() + static_cast<std::ptrdiff_t>(d));
  ard.shared_alphas.assign(result.prior.alphas.begin() + static_cast<std::ptrdiff_t>(d), result.prior.alphas.end());
  for (double a : ard.input_alphas) ard.relevance.push_back(1.0 / a);
  ard.ranking.resize(d);
  std::iota(ard.ranking.begin(), ard.ranking.end(), 0);
  std::stable_sort(ard.ranking.begin(), ard.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return ard.relevance[a] > ard.relevance[b]; });
  return ard;
}

ArdResult ard_train(const MlpArchitecture& arch, const ScaledData& train, EvidenceConfig config, std::uint64_t seed,
                    std::vector<std::string> input_names) {
  config.groups = GroupLayout::ard;
  return ard_summary(evidence_train(arch, train, config, seed), std::move(input_names));
}

PosteriorEnsemble hmc_sample(const MlpArchitecture& arch, const ScaledData& train, const ObjectiveConfig& prior,
                             const HmcConfig& config, WeightVector initial) {
  arch.validate();
  config.validate();
  if (initial.size() != arch.weight_count()) throw ConfigError("initial weights do not match the architecture");
  const auto bound = bind_objective(arch, train, prior);
  auto chain = run_hmc(bound.value, bound.gradient, std::move(initial), config);
  PosteriorEnsemble ensemble;
  ensemble.arch = arch;
  ensemble.samples = std::move(chain.samples);
  ensemble.acceptance_rate = chain.acceptance_rate();
  ensemble.divergent = chain.divergent;
  ensemble.config = config;
  return ensemble;
}

}  // namespace dyadwatch
