#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dyadwatch/hmc.hpp"

namespace fixtures {

// Anharmonic, coupled potential: E = sum x^4/4 + x^2/2 + 0.3 x0 x1.
inline double anharmonic(std::span<const double> x) {
  double e = 0.3 * x[0] * x[1];
  for (double v : x) e += 0.25 * v * v * v * v + 0.5 * v * v;
  return e;
}
inline void anharmonic_grad(std::span<const double> x, std::span<double> g) {
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] * x[i] * x[i] + x[i];
  g[0] += 0.3 * x[1];
  g[1] += 0.3 * x[0];
}

inline double kinetic(std::span<const double> p) {
  double k = 0.0;
  for (double v : p) k += 0.5 * v * v;
  return k;
}

// Largest |H - H0| along a trajectory of fixed length.
inline double max_energy_drift(double eps, double length) {
  std::vector<double> q{0.8, -0.5, 0.3}, p{0.2, 0.9, -0.4};
  const double h0 = anharmonic(q) + kinetic(p);
  double worst = 0.0;
  const auto steps = static_cast<std::size_t>(std::llround(length / eps));
  for (std::size_t s = 0; s < steps; ++s) {
    dyadwatch::leapfrog(q, p, anharmonic_grad, eps, 1);
    worst = std::max(worst, std::abs(anharmonic(q) + kinetic(p) - h0));
  }
  return worst;
}

}  // namespace fixtures
