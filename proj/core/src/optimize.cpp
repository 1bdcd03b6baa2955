#include "dyadwatch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

double checked(double f, const char* what) {
  if (!std::isfinite(f)) throw NumericError(std::string(what) + ": objective returned a non-finite value");
  return f;
}

}  // namespace

GssResult gss_minimize(const std::function<double(double)>& objective, double lo, double hi, double tolerance,
                       const BracketObserver& observer) {
  if (!(lo < hi)) throw ConfigError("golden-section search needs lo < hi");
  if (!(tolerance > 0.0)) throw ConfigError("golden-section tolerance must be positive");

  GssResult out;
  double width = hi - lo;
  // Interior points sit at lo + (1 - rho) w and lo + rho w.
  double x1 = lo + (1.0 - kGoldenRatio) * width;
  double x2 = lo + kGoldenRatio * width;
  double f1 = checked(objective(x1), "gss");
  double f2 = checked(objective(x2), "gss");
  out.evaluations = 2;

  while (width >= tolerance) {
    width *= kGoldenRatio;
    if (f1 <= f2) {
      x2 = x1;
      f2 = f1;
      x1 = lo + (1.0 - kGoldenRatio) * width;
      f1 = checked(objective(x1), "gss");
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGoldenRatio * width;
      f2 = checked(objective(x2), "gss");
    }
    ++out.evaluations;
    if (observer) observer(lo, width);
  }
  out.x = lo + 0.5 * width;
  out.f = checked(objective(out.x), "gss");
  ++out.evaluations;
  return out;
}

void SaConfig::validate() const {
  if (!(initial_temperature >= 0.0)) throw ConfigError("SA initial temperature must be non-negative");
  if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) throw ConfigError("SA cooling factor must lie in (0,1)");
  if (steps < 1) throw ConfigError("SA needs at least one step");
  if (!(proposal_scale >= 0.0)) throw ConfigError("SA proposal scale must be non-negative");
  if (epoch_length < 1) throw ConfigError("SA epoch length must be at least 1");
}

double reflect_unit(double x) noexcept {
  if (!std::isfinite(x)) return 0.5;
  const double y = std::fmod(std::fabs(x), 2.0);
  return y > 1.0 ? 2.0 - y : y;
}

SaResult sa_minimize(const std::function<double(std::span<const double>)>& objective, std::vector<double> start,
                     const SaConfig& config) {
  config.validate();
  for (auto& v : start) v = std::clamp(v, 0.0, 1.0);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SaResult out;
  std::vector<double> x = start;
  double fx = checked(objective(x), "sa");
  out.evaluations = 1;
  out.x = x;
  out.f = fx;
  out.trace.push_back(out.f);

  double temperature = config.initial_temperature;
  std::vector<double> y(x.size());
  for (std::size_t s = 0; s < config.steps; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = reflect_unit(x[i] + config.proposal_scale * step(rng));
    const double fy = checked(objective(y), "sa");
    ++out.evaluations;
    const double u = unit(rng);
    const bool accept = fy <= fx || (temperature > 0.0 && u < std::exp(-(fy - fx) / temperature));
    if (accept) {
      x.swap(y);
      fx = fy;
      if (fx < out.f) {
        out.f = fx;
        out.x = x;
      }
    }
    temperature *= config.cooling_factor;
    if ((s + 1) % config.epoch_length == 0 || s + 1 == config.steps) out.trace.push_back(out.f);
  }
  return out;
}

}  // namespace dyadwatch
