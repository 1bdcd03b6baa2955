#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dyadwatch/mlp.hpp"

namespace dyadwatch {

struct HmcConfig {
  double step_size = 0.01;       // base leapfrog step epsilon0
  std::size_t leapfrog_steps = 50;
  std::size_t samples = 100;     // retained samples
  std::size_t burn_in = 100;     // discarded trajectories
  std::size_t thinning = 1;      // keep every k-th post-burn-in trajectory
  double temperature = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const HmcConfig&) const = default;
};

// Energy change beyond which a trajectory is counted as divergent.
inline constexpr double kDivergenceThreshold = 1e6;

// Half-kick / drift / half-kick repeated `steps` times, in place.
void leapfrog(std::span<double> position, std::span<double> momentum, const GradientFn& gradient,
              double step_size, std::size_t steps);

// Accepts downhill moves always, uphill moves with probability exp(-dE/T).
// Non-finite energies are rejected.
bool metropolis_accept(double energy_old, double energy_new, double temperature, std::mt19937_64& rng);

// Per-trajectory signed step: direction * epsilon0 * (0.8 + 0.4 k), k ~ U(0,1).
double jittered_step(double base_step, int direction, double k) noexcept;

struct HmcChain {
  std::vector<std::vector<double>> samples;
  std::size_t trajectories = 0;
  std::size_t accepted = 0;
  std::size_t divergent = 0;

  double acceptance_rate() const noexcept {
    return trajectories == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(trajectories);
  }
};

// Samples exp(-E(w)/T) on a flat parameter vector.
HmcChain run_hmc(const ObjectiveFn& energy, const GradientFn& gradient, std::vector<double> initial,
                 const HmcConfig& config);

}  // namespace dyadwatch
