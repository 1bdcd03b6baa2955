#include "dyadwatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dyadwatch/error.hpp"
#include "dyadwatch/mlp.hpp"

namespace dyadwatch {

namespace {

std::string describe(const SynthConfig& c, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << "synthetic seed=" << seed << " count=" << c.count;
  if (c.balance) os << " balance=" << *c.balance;
  os << " intercept=" << c.intercept << " coefficients=[";
  for (std::size_t i = 0; i < kInputCount; ++i) os << (i ? "," : "") << c.coefficients[i];
  os << "] interactions=[";
  for (std::size_t k = 0; k < c.interactions.size(); ++k) {
    const auto& t = c.interactions[k];
    os << (k ? "," : "") << t.i << "x" << t.j << ":" << t.coefficient;
  }
  os << "]";
  return os.str();
}

}  // namespace

void SynthConfig::validate() const {
  if (count == 0) throw ConfigError("synthetic count must be positive");
  if (balance && !(*balance > 0.0 && *balance < 1.0)) throw ConfigError("balance must lie in (0,1)");
  if (!std::isfinite(intercept)) throw ConfigError("intercept must be finite");
  for (double c : coefficients) {
    if (!std::isfinite(c) || c > 0.0) {
      throw ConfigError("coefficients must be finite and <= 0 (monotone in the peace direction)");
    }
  }
  for (const auto& t : interactions) {
    if (t.i >= kInputCount || t.j >= kInputCount || t.i == t.j) throw ConfigError("invalid interaction indices");
    if (!std::isfinite(t.coefficient) || t.coefficient > 0.0) {
      throw ConfigError("interaction coefficients must be finite and <= 0");
    }
  }
}

SynthConfig SynthConfig::separable(std::size_t count) {
  SynthConfig c;
  c.count = count;
  c.balance = 0.5;
  c.coefficients = {-6.0, -4.0, -4.0, -4.0, -10.0, -12.0, -16.0};
  c.intercept = 28.0;
  return c;
}

SynthConfig SynthConfig::noise(std::size_t count) {
  SynthConfig c;
  c.count = count;
  return c;
}

SynthConfig SynthConfig::two_signal(std::size_t count) {
  SynthConfig c;
  c.count = count;
  c.balance = 0.5;
  c.coefficients[index(Var::democracy)] = -6.0;
  c.coefficients[index(Var::dependency)] = -8.0;
  c.intercept = 7.0;
  return c;
}

const std::array<SynthRange, kInputCount>& synth_ranges() {
  static const std::array<SynthRange, kInputCount> ranges{{
      {0.0, 1.0},     // allies
      {0.0, 1.0},     // contiguity
      {0.0, 1.0},     // major_power
      {1.0, 4.2},     // distance
      {0.0, 3.0},     // capability
      {-10.0, 10.0},  // democracy
      {0.0, 0.2},     // dependency
  }};
  return ranges;
}

double peace_coordinate(std::size_t variable, double raw) {
  const auto& r = synth_ranges()[variable];
  const double s = std::clamp((raw - r.low) / (r.high - r.low), 0.0, 1.0);
  return VariableSchema::standard()[variable].orientation == PeaceOrientation::high_value_favors_peace ? s : 1.0 - s;
}

double true_dispute_probability(const SynthConfig& config, const InputVector& raw) {
  std::array<double, kInputCount> z{};
  for (std::size_t i = 0; i < kInputCount; ++i) z[i] = peace_coordinate(i, raw[i]);
  double a = config.intercept;
  for (std::size_t i = 0; i < kInputCount; ++i) a += config.coefficients[i] * z[i];
  for (const auto& t : config.interactions) a += t.coefficient * z[t.i] * z[t.j];
  return logistic(a);
}

Dataset synth_generate(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  const auto& schema = VariableSchema::standard();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> democracy(-10, 10);
  std::uniform_int_distribution<int> state(2, 990);
  std::uniform_int_distribution<int> year(1946, 1992);

  auto draw = [&] {
    DyadYearRecord r;
    const int a = state(rng);
    int b = state(rng);
    if (b == a) b = a + 1;
    r.state_a = std::to_string(std::min(a, b));
    r.state_b = std::to_string(std::max(a, b));
    r.year = year(rng);
    for (std::size_t i = 0; i < kInputCount; ++i) {
      const auto& range = synth_ranges()[i];
      switch (schema[i].kind) {
        case VariableKind::binary: r.values[i] = unit(rng) < 0.5 ? 0.0 : 1.0; break;
        case VariableKind::ordinal: r.values[i] = static_cast<double>(democracy(rng)); break;
        case VariableKind::continuous: r.values[i] = range.low + unit(rng) * (range.high - range.low); break;
      }
    }
    r.outcome = unit(rng) < true_dispute_probability(config, r.values) ? 1 : 0;
    return r;
  };

  Dataset out;
  out.provenance = describe(config, seed);
  out.records.reserve(config.count);
  if (!config.balance) {
    for (std::size_t n = 0; n < config.count; ++n) out.records.push_back(draw());
    return out;
  }

  const auto disputes = static_cast<std::size_t>(std::llround(static_cast<double>(config.count) * *config.balance));
  std::array<std::size_t, 2> wanted{config.count - disputes, disputes};
  std::array<std::size_t, 2> have{0, 0};
  const std::size_t max_attempts = 10000 * config.count;
  for (std::size_t attempt = 0; out.records.size() < config.count; ++attempt) {
    if (attempt >= max_attempts) {
      throw ConfigError("synthetic generator cannot reach the requested balance with these coefficients");
    }
    auto r = draw();
    if (have[r.outcome] < wanted[r.outcome]) {
      ++have[r.outcome];
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace dyadwatch
