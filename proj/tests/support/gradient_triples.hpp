#pragma once

#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "dyadwatch/mlp.hpp"

namespace fixtures {

using namespace dyadwatch;

struct Triple {
  MlpArchitecture arch;
  WeightVector w;
  ScaledData data;
  ObjectiveConfig prior;
};

inline Triple random_triple(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> inputs(1, 7), hidden(1, 8), rows(5, 40);
  std::uniform_int_distribution<int> hid_act(0, 2), out_act(0, 2);
  constexpr Activation hidden_choices[] = {Activation::linear, Activation::logistic, Activation::tanh};
  constexpr Activation output_choices[] = {Activation::logistic, Activation::softmax, Activation::tanh};
  Triple t;
  t.arch.inputs = inputs(rng);
  t.arch.hidden = hidden(rng);
  t.arch.hidden_activation = hidden_choices[hid_act(rng)];
  t.arch.output_activation = output_choices[out_act(rng)];
  std::normal_distribution<double> n(0.0, 0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < t.arch.weight_count(); ++k) t.w.push_back(n(rng));
  const auto count = rows(rng);
  for (std::size_t r = 0; r < count; ++r) {
    std::vector<double> x(t.arch.inputs);
    for (auto& v : x) v = u(rng);
    t.data.push_back(x, u(rng) < 0.5 ? 0.0 : 1.0);
  }
  t.prior = make_objective_config(t.arch, GroupLayout::layered, 0.1, 0.7 + u(rng));
  for (auto& a : t.prior.alphas) a = 0.01 + u(rng);
  return t;
}

// Objective from oracle forward passes: cross-entropy plus the grouped prior.
inline double oracle_objective(const Triple& t, const std::vector<double>& w) {
  const auto& a = t.arch;
  double e = 0.0;
  for (std::size_t n = 0; n < t.data.size(); ++n) {
    const auto r = t.data.row(n);
    const double y = oracle::forward(a.inputs, a.hidden, 1, std::string(to_string(a.hidden_activation)),
                                     std::string(to_string(a.output_activation)), w,
                                     std::vector<double>(r.begin(), r.end()))[0];
    const double p = a.output_activation == Activation::tanh ? 0.5 * (1.0 + y) : y;
    e -= t.data.t[n] * std::log(p) + (1.0 - t.data.t[n]) * std::log(1.0 - p);
  }
  double prior = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) prior += 0.5 * t.prior.alphas[t.prior.group_of[i]] * w[i] * w[i];
  return t.prior.beta * e + prior;
}

}  // namespace fixtures
