#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dyadwatch {

// (sqrt(5) - 1) / 2
inline constexpr double kGoldenRatio = 0.6180339887498948482;

struct GssResult {
  double x = 0.0;
  double f = 0.0;
  std::size_t evaluations = 0;
};

// Called once per contraction with the new bracket [lo, lo + width].
using BracketObserver = std::function<void(double lo, double width)>;

// Golden-section search; contracts until the bracket is narrower than
// `tolerance` and returns its midpoint.
GssResult gss_minimize(const std::function<double(double)>& objective, double lo, double hi, double tolerance,
                       const BracketObserver& observer = {});

struct SaConfig {
  double initial_temperature = 0.05;
  double cooling_factor = 0.995;  // T <- cooling_factor * T after every step
  std::size_t steps = 1500;
  double proposal_scale = 0.15;
  std::uint64_t seed = 0;
  std::size_t epoch_length = 50;  // steps per trace entry

  void validate() const;
};

struct SaResult {
  std::vector<double> x;      // best point ever visited
  double f = 0.0;
  std::vector<double> trace;  // best cost at the start and after each epoch
  std::size_t evaluations = 0;
};

// Simulated annealing on the unit box with Gaussian proposals reflected at
// the bounds.
SaResult sa_minimize(const std::function<double(std::span<const double>)>& objective, std::vector<double> start,
                     const SaConfig& config);

// Reflects x into [0, 1].
double reflect_unit(double x) noexcept;

}  // namespace dyadwatch
