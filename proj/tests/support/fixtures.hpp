#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>

#include "dyadwatch/predictor.hpp"
#include "dyadwatch/schema.hpp"

namespace fixtures {

// Scaling spans each variable's declared domain, so scaled = (raw - min) / width.
inline dyadwatch::ScalingParams domain_scaling() {
  dyadwatch::ScalingParams s;
  const auto& schema = dyadwatch::VariableSchema::standard();
  for (std::size_t i = 0; i < dyadwatch::kInputCount; ++i) {
    s.low[i] = schema[i].domain_min;
    s.high[i] = schema[i].domain_max;
  }
  return s;
}

// P(dispute) = logistic(bias + sum c_i * scaled_i), built as a one-unit
// linear-hidden network.
inline dyadwatch::Predictor linear_predictor(const std::array<double, dyadwatch::kInputCount>& c, double bias) {
  using namespace dyadwatch;
  MlpArchitecture arch{.hidden = 1, .hidden_activation = Activation::linear};
  WeightVector w(c.begin(), c.end());
  w.push_back(0.0);   // b1
  w.push_back(1.0);   // w2
  w.push_back(bias);  // b2
  return Predictor(MlpModel{arch, w}, domain_scaling());
}

// Strictly decreasing in every peace direction.
inline dyadwatch::Predictor monotone_predictor() {
  return linear_predictor({-2.0, 2.0, 2.0, -2.0, -3.0, -3.0, -4.0}, 3.0);
}

inline dyadwatch::DyadYearRecord hostile_case() {
  dyadwatch::DyadYearRecord r;
  r.state_a = "1";
  r.state_b = "2";
  r.year = 2000;
  r.values = {0, 1, 1, 0.5, 1.0, -8, 0.05};
  r.outcome = 1;
  return r;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("dyadwatch-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
