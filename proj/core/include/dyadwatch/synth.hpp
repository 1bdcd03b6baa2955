#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadwatch/dataset.hpp"

namespace dyadwatch {

// Pairwise term c * z_i * z_j on peace-oriented coordinates.
struct Interaction {
  std::size_t i = 0;
  std::size_t j = 0;
  double coefficient = 0.0;
};

// Ground truth: P(dispute) = logistic(intercept + sum c_i z_i + sum c_ij z_i z_j),
// with z_i in [0,1] the peace-oriented scaled value (1 = most peaceful end).
// Non-positive coefficients keep the probability monotone decreasing along
// every peace direction.
struct SynthConfig {
  std::size_t count = 1000;
  // When set, outcomes are drawn by rejection so that exactly
  // round(count * balance) records are disputes. Otherwise outcomes follow
  // the logistic truth directly.
  std::optional<double> balance;
  double intercept = 0.0;
  std::array<double, kInputCount> coefficients{};
  std::vector<Interaction> interactions;

  void validate() const;

  // Strongly separable truth that loads mostly on the controllable variables.
  static SynthConfig separable(std::size_t count);
  // Labels independent of the inputs.
  static SynthConfig noise(std::size_t count);
  // Only Democracy and Dependency carry signal.
  static SynthConfig two_signal(std::size_t count);
};

// Raw sampling ranges the generator uses per variable (inside the schema domain).
struct SynthRange {
  double low;
  double high;
};
const std::array<SynthRange, kInputCount>& synth_ranges();

// Peace-oriented coordinate of a raw value under the generator ranges.
double peace_coordinate(std::size_t variable, double raw);
double true_dispute_probability(const SynthConfig& config, const InputVector& raw);

Dataset synth_generate(const SynthConfig& config, std::uint64_t seed);

}  // namespace dyadwatch
