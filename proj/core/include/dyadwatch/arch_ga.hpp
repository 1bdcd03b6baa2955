#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadwatch/dataset.hpp"
#include "dyadwatch/mlp.hpp"
#include "dyadwatch/scg.hpp"

namespace dyadwatch {

// Bit i has weight 2^i within its field.
//   bits 0..6   hidden-unit code (M = 1 + code mod m_max)
//   bits 7..8   hidden activation: linear, logistic, tanh, tanh
//   bits 9..10  output activation: logistic, softmax, linear, tanh
inline constexpr std::size_t kChromosomeBits = 11;
using Chromosome = std::bitset<kChromosomeBits>;

Chromosome make_chromosome(unsigned hidden_code, unsigned hidden_activation_code,
                           unsigned output_activation_code);
std::string to_bit_string(const Chromosome& c);  // bit 0 first

// floor(n / (r (i + o))), at least 1.
std::size_t m_max(std::size_t n, std::size_t inputs, std::size_t outputs, double r);

MlpArchitecture decode(const Chromosome& chromosome, std::size_t m_max_value,
                       std::size_t inputs = kInputCount);

struct FitnessOptions {
  double weight_decay = 0.01;
  double init_scale = 1.0;
  ScgLimits training{.max_iterations = 100};
};

// Mean held-out AUC over `folds` stratified 80/20 splits of `train`.
// Training failures score 0.
double evaluate_fitness(const MlpArchitecture& arch, const ScaledData& train, std::size_t folds,
                        std::uint64_t seed, const FitnessOptions& options = {});

struct GaConfig {
  std::size_t population_size = 20;
  std::size_t generations = 10;
  double crossover_rate = 0.8;
  double mutation_rate = 0.02;
  double r = 12.5;
  std::size_t elitism = 1;
  std::size_t folds = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  FitnessOptions fitness;

  void validate() const;
};

// Index drawn with probability proportional to fitness (uniform if all zero).
std::size_t roulette_select(std::span<const double> fitness, std::mt19937_64& rng);
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, std::size_t point);
Chromosome mutate(Chromosome c, double rate, std::mt19937_64& rng);

struct GaGeneration {
  std::size_t generation = 0;
  double best_fitness = 0.0;  // best ever up to and including this generation
  double mean_fitness = 0.0;  // current population
  Chromosome best;
};

struct GaResult {
  MlpArchitecture best;
  Chromosome best_chromosome;
  double best_fitness = 0.0;
  std::size_t m_max = 1;
  std::vector<GaGeneration> history;
  std::vector<Chromosome> final_population;
};

// Fitness of a chromosome depends only on (seed, chromosome), so evaluations
// can run in any order or concurrently.
GaResult ga_search(const ScaledData& train, const GaConfig& config,
                   std::vector<Chromosome> initial_population = {});

// generation,best_fitness,mean_fitness,best_chromosome_bits
std::string ga_history_csv(const GaResult& result);

}  // namespace dyadwatch
