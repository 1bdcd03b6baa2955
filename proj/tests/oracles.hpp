#pragma once

// Reference implementations used only by tests. They share no code with the
// library: plain loops over the documented weight layout, textbook
// statistics, and finite differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace oracle {

// Activation names follow the library's string forms.
inline double activate(const std::string& name, double a) {
  if (name == "linear") return a;
  if (name == "logistic") return 1.0 / (1.0 + std::exp(-a));
  if (name == "tanh") return std::tanh(a);
  return a;
}

// Layout: w1[j*D+i], b1[j], w2[k*H+j], b2[k]. Returns raw outputs y_k;
// a single "softmax" output is the logistic of its logit.
inline std::vector<double> forward(std::size_t d, std::size_t h, std::size_t k, const std::string& hidden_act,
                                   const std::string& output_act, const std::vector<double>& w,
                                   const std::vector<double>& x) {
  const std::size_t b1 = h * d, w2 = b1 + h, b2 = w2 + k * h;
  std::vector<double> z(h);
  for (std::size_t j = 0; j < h; ++j) {
    double a = w[b1 + j];
    for (std::size_t i = 0; i < d; ++i) a += w[j * d + i] * x[i];
    z[j] = activate(hidden_act, a);
  }
  std::vector<double> y(k);
  for (std::size_t o = 0; o < k; ++o) {
    double a = w[b2 + o];
    for (std::size_t j = 0; j < h; ++j) a += w[w2 + o * h + j] * z[j];
    y[o] = (output_act == "softmax" && k == 1) ? activate("logistic", a) : activate(output_act, a);
  }
  if (output_act == "softmax" && k > 1) {
    const double m = *std::max_element(y.begin(), y.end());
    double s = 0.0;
    for (auto& v : y) s += (v = std::exp(v - m));
    for (auto& v : y) v /= s;
  }
  return y;
}

// Central differences with step h.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Probability that a random dispute outscores a random non-dispute, ties
// counted half. O(n_d * n_p).
inline double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (labels[a] != 1) continue;
    for (std::size_t b = 0; b < scores.size(); ++b) {
      if (labels[b] != 0) continue;
      ++pairs;
      if (scores[a] > scores[b]) wins += 1.0;
      else if (scores[a] == scores[b]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov statistic of `sample` against the standard normal.
inline double ks_statistic_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic p-value with the Stephens small-sample correction.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    sum += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Standard error of the mean from non-overlapping batch means; robust to
// autocorrelation in MCMC output.
inline double batch_means_se(std::span<const double> v, std::size_t batches = 50) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) means.push_back(mean(v.subspan(b * len, len)));
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

// P(X >= k) for X ~ Binomial(n, p).
inline double binomial_upper_tail(std::size_t n, std::size_t k, double p) {
  double total = 0.0;
  for (std::size_t i = k; i <= n; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                            static_cast<double>(i) * std::log(p) + static_cast<double>(n - i) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

}  // namespace oracle
