#include "dyadwatch/arch_ga.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dyadwatch/error.hpp"
#include "dyadwatch/eval.hpp"
#include "dyadwatch/parallel.hpp"
#include "dyadwatch/seed.hpp"

namespace dyadwatch {

namespace {

constexpr std::size_t kHiddenBits = 7;

unsigned field(const Chromosome& c, std::size_t first, std::size_t width) {
  unsigned v = 0;
  for (std::size_t b = 0; b < width; ++b) v |= static_cast<unsigned>(c[first + b]) << b;
  return v;
}

constexpr Activation kHiddenCodes[4] = {Activation::linear, Activation::logistic, Activation::tanh, Activation::tanh};
constexpr Activation kOutputCodes[4] = {Activation::logistic, Activation::softmax, Activation::linear,
                                        Activation::tanh};

}  // namespace

Chromosome make_chromosome(unsigned hidden_code, unsigned hidden_activation_code, unsigned output_activation_code) {
  if (hidden_code >= (1u << kHiddenBits) || hidden_activation_code > 3 || output_activation_code > 3) {
    throw ConfigError("chromosome field out of range");
  }
  const unsigned long bits = hidden_code | (hidden_activation_code << 7) | (output_activation_code << 9);
  return Chromosome(bits);
}

std::string to_bit_string(const Chromosome& c) {
  std::string s(kChromosomeBits, '0');
  for (std::size_t i = 0; i < kChromosomeBits; ++i) s[i] = c[i] ? '1' : '0';
  return s;
}

std::size_t m_max(std::size_t n, std::size_t inputs, std::size_t outputs, double r) {
  if (!(r > 0.0)) throw ConfigError("r must be positive");
  const double bound = std::floor(static_cast<double>(n) / (r * static_cast<double>(inputs + outputs)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(bound));
}

MlpArchitecture decode(const Chromosome& chromosome, std::size_t m_max_value, std::size_t inputs) {
  if (m_max_value < 1) throw ConfigError("m_max must be at least 1");
  MlpArchitecture arch;
  arch.inputs = inputs;
  arch.outputs = 1;
  arch.hidden = 1 + field(chromosome, 0, kHiddenBits) % m_max_value;
  arch.hidden_activation = kHiddenCodes[field(chromosome, 7, 2)];
  arch.output_activation = kOutputCodes[field(chromosome, 9, 2)];
  return arch;
}

double evaluate_fitness(const MlpArchitecture& arch, const ScaledData& train, std::size_t folds, std::uint64_t seed,
                        const FitnessOptions& options) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t n = 0; n < train.size(); ++n) by_class[train.t[n] > 0.5 ? 1 : 0].push_back(n);
  if (by_class[0].size() < 2 || by_class[1].size() < 2) throw ConfigError("fitness needs both classes");
  folds = std::max<std::size_t>(folds, 1);

  double total = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::mt19937_64 rng(derive_seed(seed, f, 0x5ca1ab1e));
    std::vector<std::size_t> fit_rows, holdout_rows;
    for (auto indices : by_class) {
      std::shuffle(indices.begin(), indices.end(), rng);
      const auto held = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(indices.size()))), 1, indices.size() - 1);
      holdout_rows.insert(holdout_rows.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(held));
      fit_rows.insert(fit_rows.end(), indices.begin() + static_cast<std::ptrdiff_t>(held), indices.end());
    }
    std::sort(fit_rows.begin(), fit_rows.end());
    std::sort(holdout_rows.begin(), holdout_rows.end());
    const auto fit_data = train.select_rows(fit_rows);
    const auto holdout = train.select_rows(holdout_rows);

    double score = 0.0;
    try {
      const auto prior = ObjectiveConfig::single(arch.weight_count(), options.weight_decay);
      const auto bound = bind_objective(arch, fit_data, prior);
      auto result = scg_minimize(bound.value, bound.gradient, init_weights(arch, rng(), options.init_scale),
                                 options.training);
      std::vector<double> scores;
      std::vector<int> labels;
      for (std::size_t n = 0; n < holdout.size(); ++n) {
        scores.push_back(predict_probability(arch, result.weights, holdout.row(n)));
        labels.push_back(holdout.t[n] > 0.5 ? 1 : 0);
      }
      if (std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); })) {
        score = auc(scores, labels);
      }
    } catch (const Error&) {
      score = 0.0;
    }
    total += score;
  }
  return total / static_cast<double>(folds);
}

void GaConfig::validate() const {
  if (population_size < 2) throw ConfigError("GA population must have at least 2 members");
  if (generations < 1) throw ConfigError("GA needs at least one generation");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("crossover rate must lie in [0,1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("mutation rate must lie in [0,1]");
  if (!(r > 0.0)) throw ConfigError("r must be positive");
  if (elitism > population_size) throw ConfigError("elitism exceeds population size");
}

std::size_t roulette_select(std::span<const double> fitness, std::mt19937_64& rng) {
  if (fitness.empty()) throw ConfigError("roulette over an empty population");
  double total = 0.0;
  for (double f : fitness) total += std::max(f, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(total > 0.0)) {
    return std::min(fitness.size() - 1, static_cast<std::size_t>(unit(rng) * static_cast<double>(fitness.size())));
  }
  const double spin = unit(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    acc += std::max(fitness[i], 0.0);
    if (spin < acc) return i;
  }
  return fitness.size() - 1;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, std::size_t point) {
  Chromosome c1 = a, c2 = b;
  for (std::size_t i = point; i < kChromosomeBits; ++i) {
    c1[i] = b[i];
    c2[i] = a[i];
  }
  return {c1, c2};
}

Chromosome mutate(Chromosome c, double rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < kChromosomeBits; ++i) {
    if (unit(rng) < rate) c.flip(i);
  }
  return c;
}

GaResult ga_search(const ScaledData& train, const GaConfig& config, std::vector<Chromosome> population) {
  config.validate();
  GaResult result;
  result.m_max = m_max(train.size(), train.inputs, 1, config.r);

  if (population.empty()) {
    std::mt19937_64 rng(derive_seed(config.seed, 0x1417));
    std::uniform_int_distribution<unsigned long> bits(0, (1ul << kChromosomeBits) - 1);
    for (std::size_t i = 0; i < config.population_size; ++i) population.emplace_back(bits(rng));
  }
  if (population.size() != config.population_size) throw ConfigError("initial population has the wrong size");

  std::map<unsigned long, double> cache;
  auto evaluate_population = [&](const std::vector<Chromosome>& pop) {
    std::vector<unsigned long> pending;
    for (const auto& c : pop) {
      if (!cache.contains(c.to_ulong()) &&
          std::find(pending.begin(), pending.end(), c.to_ulong()) == pending.end()) {
        pending.push_back(c.to_ulong());
      }
    }
    std::vector<double> scores(pending.size());
    parallel_for(pending.size(), config.threads, [&](std::size_t k) {
      const Chromosome c(pending[k]);
      scores[k] = evaluate_fitness(decode(c, result.m_max, train.inputs), train, config.folds,
                                   derive_seed(config.seed, pending[k], 0xf17), config.fitness);
    });
    for (std::size_t k = 0; k < pending.size(); ++k) cache[pending[k]] = scores[k];
    std::vector<double> fitness;
    for (const auto& c : pop) fitness.push_back(cache.at(c.to_ulong()));
    return fitness;
  };

  result.best_fitness = -1.0;
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    const auto fitness = evaluate_population(population);
    for (std::size_t i = 0; i < population.size(); ++i) {
      if (fitness[i] > result.best_fitness) {
        result.best_fitness = fitness[i];
        result.best_chromosome = population[i];
      }
    }
    const double mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(fitness.size());
    result.history.push_back({gen, result.best_fitness, mean, result.best_chromosome});
    if (gen + 1 == config.generations) break;

    std::mt19937_64 rng(derive_seed(config.seed, gen + 1, 0xb12ed));
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

    std::vector<Chromosome> next;
    next.reserve(population.size());
    for (std::size_t e = 0; e < config.elitism; ++e) next.push_back(population[order[e]]);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> cut(1, kChromosomeBits - 1);
    while (next.size() < population.size()) {
      const auto& a = population[roulette_select(fitness, rng)];
      const auto& b = population[roulette_select(fitness, rng)];
      auto [c1, c2] = unit(rng) < config.crossover_rate ? crossover(a, b, cut(rng)) : std::pair{a, b};
      next.push_back(mutate(c1, config.mutation_rate, rng));
      if (next.size() < population.size()) next.push_back(mutate(c2, config.mutation_rate, rng));
    }
    population = std::move(next);
  }
  result.best = decode(result.best_chromosome, result.m_max, train.inputs);
  result.final_population = std::move(population);
  return result;
}

std::string ga_history_csv(const GaResult& result) {
  std::string out = "generation,best_fitness,mean_fitness,best_chromosome_bits\n";
  for (const auto& g : result.history) {
    out += std::to_string(g.generation) + ',' + format_double(g.best_fitness) + ',' + format_double(g.mean_fitness) +
           ',' + to_bit_string(g.best) + '\n';
  }
  return out;
}

}  // namespace dyadwatch
