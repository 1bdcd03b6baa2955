#include "dyadwatch/hmc.hpp"

#include <cmath>
#include <limits>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

void HmcConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("hmc step size must be positive");
  if (leapfrog_steps < 1) throw ConfigError("hmc needs at least one leapfrog step");
  if (samples < 1) throw ConfigError("hmc needs at least one retained sample");
  if (thinning < 1) throw ConfigError("hmc thinning must be >= 1");
  if (!(temperature > 0.0)) throw ConfigError("hmc temperature must be positive");
}

void leapfrog(std::span<double> position, std::span<double> momentum, const GradientFn& gradient, double step_size,
              std::size_t steps) {
  if (steps < 1) throw ConfigError("leapfrog needs at least one step");
  if (position.size() != momentum.size()) throw ConfigError("position and momentum sizes differ");
  const std::size_t n = position.size();
  std::vector<double> g(n);
  gradient(position, g);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) momentum[i] -= 0.5 * step_size * g[i];
    for (std::size_t i = 0; i < n; ++i) position[i] += step_size * momentum[i];
    gradient(position, g);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(g[i])) throw NumericError("non-finite gradient during leapfrog");
      momentum[i] -= 0.5 * step_size * g[i];
    }
  }
}

bool metropolis_accept(double energy_old, double energy_new, double temperature, std::mt19937_64& rng) {
  const double dE = energy_new - energy_old;
  if (std::isnan(dE)) return false;
  if (dE <= 0.0) return true;
  if (!std::isfinite(dE)) return false;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < std::exp(-dE / temperature);
}

double jittered_step(double base_step, int direction, double k) noexcept {
  return static_cast<double>(direction) * base_step * (0.8 + 0.4 * k);
}

HmcChain run_hmc(const ObjectiveFn& energy, const GradientFn& gradient, std::vector<double> initial,
                 const HmcConfig& config) {
  config.validate();
  const std::size_t n = initial.size();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  HmcChain chain;
  chain.samples.reserve(config.samples);
  std::vector<double> w = std::move(initial);
  double e_current = energy(w);
  if (!std::isfinite(e_current)) throw NumericError("hmc energy is not finite at the starting point");

  std::vector<double> w_new(n), p(n);
  std::size_t post_burn_in = 0;
  while (chain.samples.size() < config.samples) {
    for (auto& v : p) v = normal(rng);
    const int direction = unit(rng) < 0.5 ? -1 : 1;
    const double eps = jittered_step(config.step_size, direction, unit(rng));

    double kinetic = 0.0;
    for (double v : p) kinetic += 0.5 * v * v;
    const double h_old = e_current + kinetic;

    w_new = w;
    double h_new = std::numeric_limits<double>::infinity();
    double e_new = h_new;
    try {
      leapfrog(w_new, p, gradient, eps, config.leapfrog_steps);
      e_new = energy(w_new);
      double kinetic_new = 0.0;
      for (double v : p) kinetic_new += 0.5 * v * v;
      h_new = e_new + kinetic_new;
    } catch (const NumericError&) {
      h_new = std::numeric_limits<double>::infinity();
    }

    ++chain.trajectories;
    const bool diverged = !std::isfinite(h_new) || std::abs(h_new - h_old) > kDivergenceThreshold;
    if (diverged) {
      ++chain.divergent;
    } else if (metropolis_accept(h_old, h_new, config.temperature, rng)) {
      ++chain.accepted;
      w.swap(w_new);
      e_current = e_new;
    }

    if (chain.trajectories > config.burn_in && ++post_burn_in % config.thinning == 0) chain.samples.push_back(w);
  }
  return chain;
}

}  // namespace dyadwatch
