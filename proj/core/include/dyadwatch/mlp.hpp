#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "dyadwatch/dataset.hpp"

namespace dyadwatch {

enum class Activation { linear, logistic, tanh, softmax };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

double logistic(double a) noexcept;

struct MlpArchitecture {
  std::size_t inputs = kInputCount;
  std::size_t hidden = 1;
  std::size_t outputs = 1;
  Activation hidden_activation = Activation::tanh;
  Activation output_activation = Activation::logistic;

  std::size_t weight_count() const noexcept {
    return hidden * inputs + hidden + outputs * hidden + outputs;
  }
  void validate() const;

  bool operator==(const MlpArchitecture&) const = default;
};

// Flat weight layout, tag "w1-b1-w2-b2":
//   [0, H*D)            first-layer weights, index j*D + i (input i -> hidden j)
//   [H*D, H*D+H)        hidden biases
//   [.., + K*H)         second-layer weights, index k*H + j
//   [.., + K)           output biases
struct WeightLayout {
  std::size_t inputs, hidden, outputs;

  explicit WeightLayout(const MlpArchitecture& arch) noexcept
      : inputs(arch.inputs), hidden(arch.hidden), outputs(arch.outputs) {}

  std::size_t w1(std::size_t j, std::size_t i) const noexcept { return j * inputs + i; }
  std::size_t b1(std::size_t j) const noexcept { return hidden * inputs + j; }
  std::size_t w2(std::size_t k, std::size_t j) const noexcept {
    return hidden * inputs + hidden + k * hidden + j;
  }
  std::size_t b2(std::size_t k) const noexcept {
    return hidden * inputs + hidden + outputs * hidden + k;
  }
  std::size_t size() const noexcept { return b2(0) + outputs; }
};

inline constexpr std::string_view kWeightLayoutTag = "w1-b1-w2-b2";
using WeightVector = std::vector<double>;

// Zero-mean Gaussian draws with deviation scale / sqrt(fan-in); fan-in is the
// input count for the first layer and the hidden count for the second.
WeightVector init_weights(const MlpArchitecture& arch, std::uint64_t seed, double scale = 1.0);

// Network output y_k. For a single softmax output the two-class softmax against
// an implicit zero logit is used, which equals the logistic.
void forward(const MlpArchitecture& arch, std::span<const double> weights,
             std::span<const double> input, std::span<double> output);
std::vector<double> forward(const MlpArchitecture& arch, std::span<const double> weights,
                            std::span<const double> input);

// Maps an output unit value to a dispute probability: tanh outputs map by
// (1+y)/2, linear outputs are clamped to [0,1], the rest pass through.
double output_probability(Activation output_activation, double y) noexcept;

// Probability of the first output unit.
double predict_probability(const MlpArchitecture& arch, std::span<const double> weights,
                           std::span<const double> input);

inline constexpr double kProbabilityClamp = 1e-12;

// Penalized cross-entropy: beta-weighted data term plus grouped weight decay.
struct ObjectiveConfig {
  double beta = 1.0;
  std::vector<std::size_t> group_of;  // group index per weight
  std::vector<double> alphas;         // one per group

  std::size_t group_count() const noexcept { return alphas.size(); }
  std::vector<std::size_t> group_sizes() const;
  void validate(std::size_t weight_count) const;

  static ObjectiveConfig single(std::size_t weight_count, double alpha, double beta = 1.0);
};

// Group layouts used by the Bayesian trainers.
enum class GroupLayout {
  single,   // one alpha for every weight
  layered,  // first-layer weights, hidden biases, second-layer weights, output biases
  ard,      // one group per input's fan-out, then hidden biases, second-layer weights, output biases
};

std::string_view to_string(GroupLayout g) noexcept;
GroupLayout group_layout_from_string(std::string_view name);

ObjectiveConfig make_objective_config(const MlpArchitecture& arch, GroupLayout layout, double alpha,
                                      double beta = 1.0);

double data_error(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
                  double beta = 1.0);
double objective(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
                 const ObjectiveConfig& config);
void gradient(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
              const ObjectiveConfig& config, std::span<double> out);
std::vector<double> gradient(const MlpArchitecture& arch, std::span<const double> weights,
                             const ScaledData& data, const ObjectiveConfig& config);

// Type-erased scalar field over a flat parameter vector.
using ObjectiveFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

struct ObjectiveBinding {
  ObjectiveFn value;
  GradientFn gradient;
};

// Binds a network, dataset, and prior. The referenced data and config must
// outlive the returned functions.
ObjectiveBinding bind_objective(const MlpArchitecture& arch, const ScaledData& data,
                                const ObjectiveConfig& config);

}  // namespace dyadwatch
