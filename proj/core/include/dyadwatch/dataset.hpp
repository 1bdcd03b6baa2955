#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadwatch/schema.hpp"

namespace dyadwatch {

struct Dataset {
  VariableSchema schema = VariableSchema::standard();
  std::vector<DyadYearRecord> records;
  std::string provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  std::size_t count(int outcome) const noexcept;
  std::vector<int> labels() const;
};

// Header-name matched CSV. Required columns: state_a, state_b, year, the seven
// schema columns, and outcome. Column order is free.
Dataset parse_dataset(std::string_view text, const VariableSchema& schema = VariableSchema::standard(),
                      std::string provenance = {});
std::string serialize_dataset(const Dataset& dataset);

Dataset load_dataset(const std::filesystem::path& path,
                     const VariableSchema& schema = VariableSchema::standard());
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct Split {
  Dataset train;
  Dataset test;
  bool empty_test_warning = false;
};

// Exactly n_per_class of each outcome in train, sampled without replacement;
// everything else in test. Both keep the source row order.
Split balanced_split(const Dataset& dataset, std::size_t n_per_class, std::uint64_t seed);

// Min-max scaling to [0,1] fitted on training data.
struct ScalingParams {
  InputVector low{};
  InputVector high{};

  double scale(std::size_t i, double raw) const noexcept;    // clamped to [0,1]
  double unscale(std::size_t i, double scaled) const noexcept;
  InputVector apply(const InputVector& raw) const noexcept;

  bool operator==(const ScalingParams&) const = default;
};

ScalingParams fit_scaling(const Dataset& train);
InputVector apply_scaling(const ScalingParams& params, const DyadYearRecord& record);

// Row-major scaled design matrix with binary targets.
struct ScaledData {
  std::size_t inputs = 0;
  std::vector<double> x;
  std::vector<double> t;

  std::size_t size() const noexcept { return t.size(); }
  std::span<const double> row(std::size_t n) const noexcept {
    return {x.data() + n * inputs, inputs};
  }
  void push_back(std::span<const double> row, double target);
  ScaledData select_columns(std::span<const std::size_t> columns) const;
  ScaledData select_rows(std::span<const std::size_t> rows) const;
};

ScaledData scale_dataset(const Dataset& dataset, const ScalingParams& params);

// 64-bit FNV-1a over bytes, rendered as 16 hex digits.
std::string fingerprint(std::string_view bytes);

// Shortest round-trip decimal form; used by every CSV writer.
void append_double(std::string& out, double v);
std::string format_double(double v);

}  // namespace dyadwatch
