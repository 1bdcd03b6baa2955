#include "dyadwatch/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::linear: return x;
    case Activation::logistic: return logistic(x);
    case Activation::tanh: return std::tanh(x);
    case Activation::softmax: return logistic(x);  // only reached for a single output unit
  }
  return x;
}

// Derivative expressed through the activation value.
double activate_derivative(Activation a, double value) noexcept {
  switch (a) {
    case Activation::linear: return 1.0;
    case Activation::logistic: return value * (1.0 - value);
    case Activation::tanh: return 1.0 - value * value;
    case Activation::softmax: return value * (1.0 - value);
  }
  return 1.0;
}

// Scratch buffers for one pattern.
struct Workspace {
  std::vector<double> hidden;
  std::vector<double> output;
  std::vector<double> delta_out;
  std::vector<double> delta_hidden;

  explicit Workspace(const MlpArchitecture& arch)
      : hidden(arch.hidden), output(arch.outputs), delta_out(arch.outputs), delta_hidden(arch.hidden) {}
};

void forward_into(const MlpArchitecture& arch, std::span<const double> w, std::span<const double> x, Workspace& ws) {
  const WeightLayout L(arch);
  for (std::size_t j = 0; j < arch.hidden; ++j) {
    double a = w[L.b1(j)];
    const double* row = w.data() + L.w1(j, 0);
    for (std::size_t i = 0; i < arch.inputs; ++i) a += row[i] * x[i];
    ws.hidden[j] = activate(arch.hidden_activation, a);
  }
  for (std::size_t k = 0; k < arch.outputs; ++k) {
    double a = w[L.b2(k)];
    const double* row = w.data() + L.w2(k, 0);
    for (std::size_t j = 0; j < arch.hidden; ++j) a += row[j] * ws.hidden[j];
    ws.output[k] = a;
  }
  if (arch.output_activation == Activation::softmax && arch.outputs > 1) {
    const double m = *std::max_element(ws.output.begin(), ws.output.end());
    double sum = 0.0;
    for (auto& v : ws.output) {
      v = std::exp(v - m);
      sum += v;
    }
    for (auto& v : ws.output) v /= sum;
  } else {
    for (auto& v : ws.output) v = activate(arch.output_activation, v);
  }
}

double clamp_probability(double p) noexcept { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

double cross_entropy(double p, double t) noexcept {
  const double pc = clamp_probability(p);
  return -(t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc));
}

// dE/dp of the clamped cross-entropy; zero where the clamp is active.
double cross_entropy_slope(double p, double t) noexcept {
  if (!(p > kProbabilityClamp && p < 1.0 - kProbabilityClamp)) return 0.0;
  return -(t / p - (1.0 - t) / (1.0 - p));
}

void check_sizes(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data) {
  if (weights.size() != arch.weight_count()) {
    throw ConfigError("weight vector has " + std::to_string(weights.size()) + " entries, architecture needs " +
                      std::to_string(arch.weight_count()));
  }
  if (data.size() == 0) throw ConfigError("objective needs a non-empty dataset");
  if (data.inputs != arch.inputs) throw ConfigError("dataset width does not match architecture inputs");
  if (arch.outputs != 1) throw ConfigError("training supports a single output unit");
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::logistic: return "logistic";
    case Activation::tanh: return "tanh";
    case Activation::softmax: return "softmax";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "linear") return Activation::linear;
  if (name == "logistic") return Activation::logistic;
  if (name == "tanh" || name == "hyperbolic_tangent") return Activation::tanh;
  if (name == "softmax") return Activation::softmax;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double logistic(double a) noexcept {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

void MlpArchitecture::validate() const {
  if (inputs < 1 || hidden < 1 || outputs < 1) throw ConfigError("architecture needs d, M, K >= 1");
  if (hidden_activation == Activation::softmax) throw ConfigError("softmax is only permitted at the output layer");
}

WeightVector init_weights(const MlpArchitecture& arch, std::uint64_t seed, double scale) {
  arch.validate();
  if (!(scale >= 0.0)) throw ConfigError("init scale must be non-negative");
  WeightVector w(arch.weight_count(), 0.0);
  if (scale == 0.0) return w;
  const WeightLayout L(arch);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> first(0.0, scale / std::sqrt(static_cast<double>(arch.inputs)));
  std::normal_distribution<double> second(0.0, scale / std::sqrt(static_cast<double>(arch.hidden)));
  const std::size_t first_end = L.w2(0, 0);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = i < first_end ? first(rng) : second(rng);
  return w;
}

void forward(const MlpArchitecture& arch, std::span<const double> weights, std::span<const double> input,
             std::span<double> output) {
  if (input.size() != arch.inputs) {
    throw ConfigError("input has " + std::to_string(input.size()) + " values, network expects " +
                      std::to_string(arch.inputs));
  }
  if (weights.size() != arch.weight_count()) throw ConfigError("weight vector length does not match architecture");
  if (output.size() != arch.outputs) throw ConfigError("output buffer length does not match architecture");
  Workspace ws(arch);
  forward_into(arch, weights, input, ws);
  std::copy(ws.output.begin(), ws.output.end(), output.begin());
}

std::vector<double> forward(const MlpArchitecture& arch, std::span<const double> weights,
                            std::span<const double> input) {
  std::vector<double> out(arch.outputs);
  forward(arch, weights, input, out);
  return out;
}

double output_probability(Activation output_activation, double y) noexcept {
  switch (output_activation) {
    case Activation::tanh: return 0.5 * (1.0 + y);
    case Activation::linear: return std::clamp(y, 0.0, 1.0);
    default: return y;
  }
}

double predict_probability(const MlpArchitecture& arch, std::span<const double> weights,
                           std::span<const double> input) {
  const auto y = forward(arch, weights, input);
  return output_probability(arch.output_activation, y[0]);
}

std::vector<std::size_t> ObjectiveConfig::group_sizes() const {
  std::vector<std::size_t> sizes(alphas.size(), 0);
  for (auto g : group_of) ++sizes.at(g);
  return sizes;
}

void ObjectiveConfig::validate(std::size_t weight_count) const {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (group_of.size() != weight_count) throw ConfigError("every weight needs a group index");
  for (auto g : group_of) {
    if (g >= alphas.size()) throw ConfigError("group index out of range");
  }
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("alphas must be finite and non-negative");
  }
}

ObjectiveConfig ObjectiveConfig::single(std::size_t weight_count, double alpha, double beta) {
  return {beta, std::vector<std::size_t>(weight_count, 0), {alpha}};
}

std::string_view to_string(GroupLayout g) noexcept {
  switch (g) {
    case GroupLayout::single: return "single";
    case GroupLayout::layered: return "layered";
    case GroupLayout::ard: return "ard";
  }
  return "unknown";
}

GroupLayout group_layout_from_string(std::string_view name) {
  if (name == "single") return GroupLayout::single;
  if (name == "layered") return GroupLayout::layered;
  if (name == "ard") return GroupLayout::ard;
  throw ConfigError("unknown group layout '" + std::string(name) + "'");
}

ObjectiveConfig make_objective_config(const MlpArchitecture& arch, GroupLayout layout, double alpha, double beta) {
  const WeightLayout L(arch);
  ObjectiveConfig c;
  c.beta = beta;
  c.group_of.assign(arch.weight_count(), 0);
  if (layout == GroupLayout::single) {
    c.alphas = {alpha};
    return c;
  }
  const std::size_t first = layout == GroupLayout::ard ? arch.inputs : 1;
  for (std::size_t j = 0; j < arch.hidden; ++j) {
    for (std::size_t i = 0; i < arch.inputs; ++i) c.group_of[L.w1(j, i)] = layout == GroupLayout::ard ? i : 0;
    c.group_of[L.b1(j)] = first;
  }
  for (std::size_t k = 0; k < arch.outputs; ++k) {
    for (std::size_t j = 0; j < arch.hidden; ++j) c.group_of[L.w2(k, j)] = first + 1;
    c.group_of[L.b2(k)] = first + 2;
  }
  c.alphas.assign(first + 3, alpha);
  return c;
}

double data_error(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data, double beta) {
  check_sizes(arch, weights, data);
  Workspace ws(arch);
  double sum = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    forward_into(arch, weights, data.row(n), ws);
    sum += cross_entropy(output_probability(arch.output_activation, ws.output[0]), data.t[n]);
  }
  return beta * sum;
}

double objective(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
                 const ObjectiveConfig& config) {
  config.validate(weights.size());
  double prior = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    prior += 0.5 * config.alphas[config.group_of[i]] * weights[i] * weights[i];
  }
  return data_error(arch, weights, data, config.beta) + prior;
}

void gradient(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
              const ObjectiveConfig& config, std::span<double> out) {
  check_sizes(arch, weights, data);
  config.validate(weights.size());
  if (out.size() != weights.size()) throw ConfigError("gradient buffer has the wrong length");
  const WeightLayout L(arch);
  Workspace ws(arch);
  std::fill(out.begin(), out.end(), 0.0);
  const double beta = config.beta;

  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto x = data.row(n);
    const double t = data.t[n];
    forward_into(arch, weights, x, ws);
    const double y = ws.output[0];
    double delta = 0.0;
    switch (arch.output_activation) {
      case Activation::logistic:
      case Activation::softmax: delta = beta * (y - t); break;
      case Activation::tanh:
        delta = beta * cross_entropy_slope(output_probability(Activation::tanh, y), t) * 0.5 * (1.0 - y * y);
        break;
      case Activation::linear: delta = beta * cross_entropy_slope(y, t); break;
    }
    if (delta == 0.0) continue;
    out[L.b2(0)] += delta;
    for (std::size_t j = 0; j < arch.hidden; ++j) {
      out[L.w2(0, j)] += delta * ws.hidden[j];
      const double dh = delta * weights[L.w2(0, j)] * activate_derivative(arch.hidden_activation, ws.hidden[j]);
      out[L.b1(j)] += dh;
      double* row = out.data() + L.w1(j, 0);
      for (std::size_t i = 0; i < arch.inputs; ++i) row[i] += dh * x[i];
    }
  }
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] += config.alphas[config.group_of[i]] * weights[i];
}

std::vector<double> gradient(const MlpArchitecture& arch, std::span<const double> weights, const ScaledData& data,
                             const ObjectiveConfig& config) {
  std::vector<double> g(weights.size());
  gradient(arch, weights, data, config, g);
  return g;
}

ObjectiveBinding bind_objective(const MlpArchitecture& arch, const ScaledData& data, const ObjectiveConfig& config) {
  return {
      [arch, &data, &config](std::span<const double> w) { return objective(arch, w, data, config); },
      [arch, &data, &config](std::span<const double> w, std::span<double> g) {
        gradient(arch, w, data, config, g);
      },
  };
}

}  // namespace dyadwatch
