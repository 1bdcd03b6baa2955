#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dyadwatch/mlp.hpp"

namespace dyadwatch {

struct ScgLimits {
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-8;  // stop when ||g|| falls below
  double step_tolerance = 1e-10;     // together with objective_tolerance
  double objective_tolerance = 1e-12;
};

enum class ScgStop { max_iterations, gradient_norm, converged, step_collapse };

std::string_view to_string(ScgStop s) noexcept;

struct ScgResult {
  std::vector<double> weights;
  double value = 0.0;
  std::vector<double> trace;  // objective after each accepted step, starting with the initial value
  std::size_t iterations = 0;
  std::size_t accepted_steps = 0;
  ScgStop stop = ScgStop::max_iterations;
};

// Scaled conjugate gradient (Moller 1993) with sigma0 = 1e-4 and the published
// lambda adjustment schedule.
ScgResult scg_minimize(const ObjectiveFn& objective, const GradientFn& gradient,
                       std::vector<double> initial, const ScgLimits& limits = {});

}  // namespace dyadwatch
