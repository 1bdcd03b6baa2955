#include <benchmark/benchmark.h>

#include "dyadwatch/control.hpp"
#include "dyadwatch/hmc.hpp"
#include "dyadwatch/mlp.hpp"
#include "dyadwatch/synth.hpp"
#include "dyadwatch/training.hpp"

using namespace dyadwatch;

namespace {

const ScaledData& bench_data() {
  static const ScaledData data = [] {
    const auto d = synth_generate(SynthConfig::separable(1000), 1);
    return scale_dataset(d, fit_scaling(d));
  }();
  return data;
}

const Predictor& bench_predictor() {
  static const Predictor p = [] {
    TrainRecipe recipe;
    recipe.seed = 1;
    return train_predictor(synth_generate(SynthConfig::separable(1000), 2), recipe);
  }();
  return p;
}

void BM_Forward(benchmark::State& state) {
  const MlpArchitecture arch{.hidden = static_cast<std::size_t>(state.range(0))};
  const auto w = init_weights(arch, 3);
  const auto& data = bench_data();
  for (auto _ : state) {
    double s = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) s += predict_probability(arch, w, data.row(n));
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(10)->Arg(40);

void BM_Gradient(benchmark::State& state) {
  const MlpArchitecture arch{.hidden = static_cast<std::size_t>(state.range(0))};
  const auto w = init_weights(arch, 3);
  const auto prior = make_objective_config(arch, GroupLayout::layered, 0.01, 1.0);
  const auto& data = bench_data();
  std::vector<double> g(w.size());
  for (auto _ : state) {
    gradient(arch, w, data, prior, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_Gradient)->Arg(5)->Arg(10)->Arg(40);

void BM_LeapfrogTrajectory(benchmark::State& state) {
  const MlpArchitecture arch{.hidden = 10};
  const auto prior = make_objective_config(arch, GroupLayout::layered, 0.01, 1.0);
  const auto& data = bench_data();
  const auto binding = bind_objective(arch, data, prior);
  auto q = init_weights(arch, 4);
  std::vector<double> p(q.size(), 0.1);
  for (auto _ : state) {
    leapfrog(q, p, binding.gradient, 1e-4, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(q.data());
  }
}
BENCHMARK(BM_LeapfrogTrajectory)->Arg(40);

void BM_ControlSingle(benchmark::State& state) {
  const auto& p = bench_predictor();
  DyadYearRecord c;
  c.values = {0, 1, 1, 1.0, 1.0, -8, 0.02};
  for (auto _ : state) benchmark::DoNotOptimize(control_single(p, c, index(Var::dependency), {}));
}
BENCHMARK(BM_ControlSingle);

void BM_ControlMulti(benchmark::State& state) {
  const auto& p = bench_predictor();
  DyadYearRecord c;
  c.values = {0, 1, 1, 1.0, 1.0, -8, 0.02};
  ControlConfig cfg;
  cfg.sa.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(control_multi(p, c, cfg));
}
BENCHMARK(BM_ControlMulti);

}  // namespace

BENCHMARK_MAIN();
