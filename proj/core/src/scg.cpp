#include "dyadwatch/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::string_view to_string(ScgStop s) noexcept {
  switch (s) {
    case ScgStop::max_iterations: return "max_iterations";
    case ScgStop::gradient_norm: return "gradient_norm";
    case ScgStop::converged: return "converged";
    case ScgStop::step_collapse: return "step_collapse";
  }
  return "unknown";
}

ScgResult scg_minimize(const ObjectiveFn& objective, const GradientFn& gradient, std::vector<double> initial,
                       const ScgLimits& limits) {
  constexpr double sigma0 = 1e-4;
  constexpr double lambda_min = 1e-15;
  constexpr double lambda_max = 1e100;
  const std::size_t n = initial.size();

  ScgResult result;
  result.weights = std::move(initial);
  auto& x = result.weights;

  double f_old = objective(x);
  if (!std::isfinite(f_old)) throw NumericError("objective is not finite at the starting point");
  result.value = f_old;
  result.trace.push_back(f_old);

  std::vector<double> g_new(n), g_old(n), d(n), x_plus(n), g_plus(n), x_new(n);
  gradient(x, g_new);
  if (std::sqrt(dot(g_new, g_new)) < limits.gradient_tolerance) {
    result.stop = ScgStop::gradient_norm;
    return result;
  }
  g_old = g_new;
  for (std::size_t i = 0; i < n; ++i) d[i] = -g_new[i];

  bool success = true;
  std::size_t n_success = 0;
  double lambda = 1.0;
  double mu = 0.0, kappa = 0.0, theta = 0.0;

  for (std::size_t it = 0; it < limits.max_iterations; ++it) {
    result.iterations = it + 1;
    if (success) {
      mu = dot(d, g_new);
      if (mu >= 0.0) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -g_new[i];
        mu = dot(d, g_new);
      }
      kappa = dot(d, d);
      if (kappa < std::numeric_limits<double>::epsilon()) {
        result.stop = ScgStop::step_collapse;
        return result;
      }
      const double sigma = sigma0 / std::sqrt(kappa);
      for (std::size_t i = 0; i < n; ++i) x_plus[i] = x[i] + sigma * d[i];
      gradient(x_plus, g_plus);
      theta = 0.0;
      for (std::size_t i = 0; i < n; ++i) theta += d[i] * (g_plus[i] - g_new[i]);
      theta /= sigma;
    }

    // Scale the curvature estimate until it is positive definite.
    double delta = theta + lambda * kappa;
    if (delta <= 0.0) {
      delta = lambda * kappa;
      lambda -= theta / kappa;
    }
    const double alpha = -mu / delta;
    for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + alpha * d[i];
    const double f_new = objective(x_new);
    const double comparison = std::isfinite(f_new) ? 2.0 * (f_new - f_old) / (alpha * mu) : -1.0;

    double max_step = 0.0;
    if (comparison >= 0.0) {
      success = true;
      ++n_success;
      ++result.accepted_steps;
      for (std::size_t i = 0; i < n; ++i) max_step = std::max(max_step, std::abs(alpha * d[i]));
      x.swap(x_new);
      const double f_prev = f_old;
      f_old = f_new;
      result.value = f_new;
      result.trace.push_back(f_new);
      if (max_step < limits.step_tolerance && std::abs(f_new - f_prev) < limits.objective_tolerance) {
        result.stop = ScgStop::converged;
        return result;
      }
      g_old.swap(g_new);
      gradient(x, g_new);
      if (std::sqrt(dot(g_new, g_new)) < limits.gradient_tolerance) {
        result.stop = ScgStop::gradient_norm;
        return result;
      }
    } else {
      success = false;
    }

    if (comparison < 0.25) lambda = std::min(4.0 * lambda, lambda_max);
    if (comparison > 0.75) lambda = std::max(0.5 * lambda, lambda_min);
    if (lambda >= lambda_max) {
      result.stop = ScgStop::step_collapse;
      return result;
    }

    if (n_success == n) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g_new[i];
      n_success = 0;
    } else if (success) {
      double gamma = 0.0;
      for (std::size_t i = 0; i < n; ++i) gamma += (g_old[i] - g_new[i]) * g_new[i];
      gamma /= mu;
      for (std::size_t i = 0; i < n; ++i) d[i] = gamma * d[i] - g_new[i];
    }
  }
  result.stop = ScgStop::max_iterations;
  return result;
}

}  // namespace dyadwatch
