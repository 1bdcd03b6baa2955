#include <doctest.h>

#include <map>

#include "dyadwatch/arch_ga.hpp"
#include "dyadwatch/error.hpp"
#include "dyadwatch/synth.hpp"

using namespace dyadwatch;

namespace {

ScaledData small_scaled(std::size_t n, std::uint64_t seed) {
  const auto d = synth_generate(SynthConfig::separable(n), seed);
  return scale_dataset(d, fit_scaling(d));
}

GaConfig quick_config(std::uint64_t seed) {
  GaConfig cfg;
  cfg.population_size = 6;
  cfg.generations = 3;
  cfg.seed = seed;
  cfg.r = 40.0;
  cfg.fitness.training.max_iterations = 40;
  return cfg;
}

}  // namespace

TEST_CASE("m_max follows the sample-to-weight ratio") {
  CHECK(m_max(1000, 7, 1, 12.5) == 10);
  CHECK(m_max(999, 7, 1, 12.5) == 9);
  CHECK(m_max(10, 7, 1, 12.5) == 1);
  CHECK(m_max(0, 7, 1, 12.5) == 1);
}

TEST_CASE("decoding stays inside the hidden-unit cap") {
  for (unsigned code = 0; code < 128; ++code) {
    for (std::size_t cap : {1, 3, 10, 128}) {
      const auto arch = decode(make_chromosome(code, 2, 0), cap);
      CHECK(arch.hidden >= 1);
      CHECK(arch.hidden <= cap);
      CHECK(arch.hidden == 1 + code % cap);
    }
  }
  CHECK(decode(make_chromosome(0, 0, 0), 5).hidden_activation == Activation::linear);
  CHECK(decode(make_chromosome(0, 1, 0), 5).hidden_activation == Activation::logistic);
  CHECK(decode(make_chromosome(0, 3, 0), 5).hidden_activation == Activation::tanh);
  CHECK(decode(make_chromosome(0, 0, 1), 5).output_activation == Activation::softmax);
  CHECK(decode(make_chromosome(0, 0, 2), 5).output_activation == Activation::linear);
  CHECK(to_bit_string(make_chromosome(1, 0, 0)) == "10000000000");
}

TEST_CASE("crossover conserves bits at every position") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Chromosome a(rng() & 0x7ff);
    const Chromosome b(rng() & 0x7ff);
    const std::size_t point = 1 + rng() % (kChromosomeBits - 1);
    const auto [c, d] = crossover(a, b, point);
    for (std::size_t i = 0; i < kChromosomeBits; ++i) {
      CHECK(int(a[i]) + int(b[i]) == int(c[i]) + int(d[i]));
      CHECK(c[i] == (i < point ? a[i] : b[i]));
    }
  }
}

TEST_CASE("roulette selection") {
  std::mt19937_64 rng(5);
  const std::vector<double> zeros(4, 0.0);
  std::map<std::size_t, int> counts;
  for (int k = 0; k < 8000; ++k) ++counts[roulette_select(zeros, rng)];
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(counts[i] - 2000) < 200);

  const std::vector<double> weighted{0.0, 1.0, 3.0};
  counts.clear();
  for (int k = 0; k < 8000; ++k) ++counts[roulette_select(weighted, rng)];
  CHECK(counts[0] == 0);
  CHECK(std::abs(counts[2] - 6000) < 250);
}

TEST_CASE("mutation rate extremes") {
  std::mt19937_64 rng(1);
  const Chromosome c(0x2a5);
  CHECK(mutate(c, 0.0, rng) == c);
  CHECK(mutate(c, 1.0, rng) == ~c);
}

TEST_CASE("fitness is a held-out AUC in [0,1]") {
  const auto data = small_scaled(300, 4);
  const MlpArchitecture arch{.hidden = 3};
  const double f = evaluate_fitness(arch, data, 2, 9);
  CHECK(f > 0.8);
  CHECK(f <= 1.0);
  CHECK(evaluate_fitness(arch, data, 2, 9) == f);
}

TEST_CASE("GA search is deterministic and its best-so-far never drops") {
  const auto data = small_scaled(300, 8);
  const auto a = ga_search(data, quick_config(11));
  REQUIRE(a.history.size() == 3);
  for (std::size_t g = 1; g < a.history.size(); ++g) {
    CHECK(a.history[g].best_fitness >= a.history[g - 1].best_fitness);
    CHECK(a.history[g].generation == g);
  }
  CHECK(a.best_fitness == a.history.back().best_fitness);
  CHECK(a.best.hidden <= a.m_max);
  CHECK(a.final_population.size() == 6);

  auto threaded_cfg = quick_config(11);
  threaded_cfg.threads = 3;
  const auto b = ga_search(data, threaded_cfg);
  CHECK(ga_history_csv(a) == ga_history_csv(b));
  CHECK(a.best_chromosome == b.best_chromosome);
  CHECK(ga_history_csv(a).rfind("generation,best_fitness,mean_fitness,best_chromosome_bits\n", 0) == 0);
}

TEST_CASE("GA config validation") {
  GaConfig cfg;
  cfg.population_size = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.elitism = cfg.population_size + 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.mutation_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
