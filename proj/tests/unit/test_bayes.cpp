#include <doctest.h>

#include <random>
#include <set>

#include "../oracles.hpp"
#include "../support/hmc_targets.hpp"
#include "dyadwatch/bayes.hpp"
#include "dyadwatch/error.hpp"
#include "dyadwatch/hmc.hpp"
#include "dyadwatch/predictor.hpp"
#include "dyadwatch/synth.hpp"

using namespace dyadwatch;

namespace {

using fixtures::anharmonic_grad;
using fixtures::max_energy_drift;

ScaledData small_data(std::uint64_t seed, std::size_t n = 200) {
  const auto d = synth_generate(SynthConfig::separable(n), seed);
  return scale_dataset(d, fit_scaling(d));
}

}  // namespace

TEST_CASE("leapfrog is time-reversible") {
  std::vector<double> q{0.8, -0.5, 0.3}, p{0.2, 0.9, -0.4};
  const auto q0 = q, p0 = p;
  leapfrog(q, p, anharmonic_grad, 0.05, 200);
  for (auto& v : p) v = -v;
  leapfrog(q, p, anharmonic_grad, 0.05, 200);
  for (auto& v : p) v = -v;
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(std::abs(q[i] - q0[i]) <= 1e-8);
    CHECK(std::abs(p[i] - p0[i]) <= 1e-8);
  }
}

TEST_CASE("leapfrog composes: n single steps equal one n-step call") {
  std::vector<double> qa{0.8, -0.5, 0.3}, pa{0.2, 0.9, -0.4};
  auto qb = qa, pb = pa;
  leapfrog(qa, pa, anharmonic_grad, 0.03, 17);
  for (int s = 0; s < 17; ++s) leapfrog(qb, pb, anharmonic_grad, 0.03, 1);
  for (std::size_t i = 0; i < qa.size(); ++i) {
    CHECK(qa[i] == doctest::Approx(qb[i]).epsilon(1e-13));
    CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-13));
  }
}

TEST_CASE("leapfrog energy error is second order") {
  const double ratio = max_energy_drift(0.1, 5.0) / max_energy_drift(0.05, 5.0);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("Metropolis rule") {
  std::mt19937_64 rng(1);
  CHECK(metropolis_accept(1.0, 0.5, 1.0, rng));
  CHECK_FALSE(metropolis_accept(1.0, std::nan(""), 1.0, rng));
  CHECK_FALSE(metropolis_accept(1.0, std::numeric_limits<double>::infinity(), 1.0, rng));
  CHECK_FALSE(metropolis_accept(0.0, 50.0, 1.0, rng));
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) accepted += metropolis_accept(0.0, std::log(2.0), 1.0, rng);
  CHECK(accepted / 20000.0 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("jittered step range and sign") {
  CHECK(jittered_step(0.1, 1, 0.0) == doctest::Approx(0.08));
  CHECK(jittered_step(0.1, -1, 1.0) == doctest::Approx(-0.12));
}

TEST_CASE("HMC samples a standard normal") {
  ObjectiveFn e = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
  GradientFn g = [](std::span<const double> x, std::span<double> out) { out[0] = x[0]; };
  HmcConfig cfg{.step_size = 0.3, .leapfrog_steps = 5, .samples = 4000, .burn_in = 100, .thinning = 1, .seed = 3};
  const auto chain = run_hmc(e, g, {2.0}, cfg);
  REQUIRE(chain.samples.size() == 4000);
  std::vector<double> xs;
  for (const auto& s : chain.samples) xs.push_back(s[0]);
  CHECK(std::abs(oracle::mean(xs)) <= 3.0 * oracle::batch_means_se(xs));
  CHECK(oracle::variance(xs) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(oracle::ks_p_value(oracle::ks_statistic_normal(xs), xs.size()) > 1e-3);
  CHECK(chain.acceptance_rate() > 0.8);
  CHECK(chain.trajectories == 4100);
}

TEST_CASE("HMC run is reproducible and thinning keeps every k-th state") {
  ObjectiveFn e = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
  GradientFn g = [](std::span<const double> x, std::span<double> out) { out[0] = x[0]; };
  HmcConfig cfg{.step_size = 0.3, .leapfrog_steps = 5, .samples = 50, .burn_in = 10, .thinning = 3, .seed = 9};
  const auto a = run_hmc(e, g, {0.0}, cfg);
  const auto b = run_hmc(e, g, {0.0}, cfg);
  CHECK(a.samples == b.samples);
  CHECK(a.trajectories == 10 + 50 * 3);
  cfg.thinning = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("divergent trajectories are rejected and counted") {
  ObjectiveFn e = [](std::span<const double> x) { return 0.5 * 1e4 * x[0] * x[0]; };
  GradientFn g = [](std::span<const double> x, std::span<double> out) { out[0] = 1e4 * x[0]; };
  HmcConfig cfg{.step_size = 1.0, .leapfrog_steps = 30, .samples = 20, .burn_in = 0, .seed = 2};
  const auto chain = run_hmc(e, g, {0.01}, cfg);
  CHECK(chain.divergent > 0);
  CHECK(chain.accepted + chain.divergent <= chain.trajectories);
  for (const auto& s : chain.samples) CHECK(std::isfinite(s[0]));
}

TEST_CASE("single-group gamma is the eigenvalue sum") {
  // Diagonal Hessian: eigenvalues are the diagonal.
  const std::vector<double> h{4.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.25};
  const std::vector<double> w{0.5, -1.0, 2.0};
  const auto prior = ObjectiveConfig::single(3, 0.5);
  const auto up = reestimate_alphas(h, w, prior);
  const double gamma = 4.0 / 4.5 + 1.0 / 1.5 + 0.25 / 0.75;
  CHECK(up.gammas[0] == doctest::Approx(gamma).epsilon(1e-12));
  CHECK(up.alphas[0] == doctest::Approx(gamma / (0.25 + 1.0 + 4.0)).epsilon(1e-12));
}

TEST_CASE("grouped gamma uses the per-group trace") {
  const std::vector<double> h{4.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.25};
  const std::vector<double> w{0.5, -1.0, 2.0};
  ObjectiveConfig prior;
  prior.group_of = {0, 0, 1};
  prior.alphas = {0.5, 2.0};
  const auto up = reestimate_alphas(h, w, prior);
  CHECK(up.gammas[0] == doctest::Approx(4.0 / 4.5 + 1.0 / 1.5).epsilon(1e-12));
  CHECK(up.gammas[1] == doctest::Approx(0.25 / 2.25).epsilon(1e-12));
  CHECK(alpha_from_gamma(0.0, 1.0) == kMinAlpha);
  CHECK(alpha_from_gamma(1.0, 0.0) == kMaxAlpha);
}

TEST_CASE("Gauss-Newton Hessian matches finite-difference Jacobians") {
  const auto data = small_data(4, 30);
  MlpArchitecture arch{.hidden = 3};
  const auto w = init_weights(arch, 8, 0.5);
  const auto h = data_hessian(arch, w, data);
  const std::size_t W = w.size();
  std::vector<double> expect(W * W, 0.0);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto r = data.row(n);
    const std::vector<double> x(r.begin(), r.end());
    auto logit = [&](const std::vector<double>& v) { return oracle::forward(7, 3, 1, "tanh", "linear", v, x)[0]; };
    const auto j = oracle::numeric_gradient(logit, w, 1e-6);
    const double y = 1.0 / (1.0 + std::exp(-logit(w)));
    for (std::size_t a = 0; a < W; ++a) {
      for (std::size_t b = 0; b < W; ++b) expect[a * W + b] += y * (1.0 - y) * j[a] * j[b];
    }
  }
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < W * W; ++k) {
    worst = std::max(worst, std::abs(h[k] - expect[k]));
    scale = std::max(scale, std::abs(expect[k]));
    CHECK(h[k] == h[(k % W) * W + k / W]);
  }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("evidence training keeps alphas positive and records its trace") {
  const auto data = small_data(6);
  MlpArchitecture arch{.hidden = 4};
  EvidenceConfig cfg;
  cfg.groups = GroupLayout::layered;
  const auto r = evidence_train(arch, data, cfg, 1);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.size() <= cfg.outer_iterations);
  CHECK(r.prior.alphas.size() == 4);
  for (double a : r.prior.alphas) {
    CHECK(a >= kMinAlpha);
    CHECK(a <= kMaxAlpha);
  }
  for (std::size_t g = 0; g < r.gammas.size(); ++g) {
    CHECK(r.gammas[g] >= 0.0);
    CHECK(r.gammas[g] <= static_cast<double>(r.group_sizes[g]) + 1e-9);
  }
  const auto again = evidence_train(arch, data, cfg, 1);
  CHECK(again.weights == r.weights);
}

TEST_CASE("ARD ranks the informative inputs first on two-signal data") {
  const auto d = synth_generate(SynthConfig::two_signal(1000), 21);
  const auto data = scale_dataset(d, fit_scaling(d));
  const auto ard = ard_train(MlpArchitecture{.hidden = 1}, data, {}, 21, d.schema.names());
  REQUIRE(ard.ranking.size() == kInputCount);
  std::set<std::size_t> top{ard.ranking[0], ard.ranking[1]};
  CHECK(top == std::set<std::size_t>{index(Var::democracy), index(Var::dependency)});
  for (std::size_t i = 0; i < kInputCount; ++i) CHECK(ard.relevance[i] == doctest::Approx(1.0 / ard.input_alphas[i]));
  CHECK(ard.shared_alphas.size() == 3);
}

TEST_CASE("posterior ensemble shape and predictive moments") {
  const auto data = small_data(7, 120);
  MlpArchitecture arch{.hidden = 3};
  const auto map = evidence_train(arch, data, {}, 2);
  HmcConfig cfg{.step_size = 0.02, .leapfrog_steps = 20, .samples = 30, .burn_in = 10, .seed = 5};
  const auto e = hmc_sample(arch, data, map.prior, cfg, map.weights);
  REQUIRE(e.samples.size() == 30);
  for (const auto& s : e.samples) CHECK(s.size() == arch.weight_count());
  CHECK(e.acceptance_rate > 0.0);

  const auto x = data.row(0);
  std::vector<double> ps;
  for (const auto& s : e.samples) ps.push_back(predict_probability(arch, s, x));
  const double m = oracle::mean(ps);
  double var = 0.0;
  for (double p : ps) var += (p - m) * (p - m);
  const double sd = std::sqrt(var / static_cast<double>(ps.size()));
  const auto pred = predictive(e, x);
  CHECK(pred.probability == doctest::Approx(m).epsilon(1e-12));
  CHECK(pred.confidence == doctest::Approx(std::max(0.0, 1.0 - 2.0 * sd)).epsilon(1e-12));

  const auto single = predictive(MlpModel{arch, map.weights}, x);
  CHECK(single.confidence == doctest::Approx(2.0 * std::abs(single.probability - 0.5)));
}
