#include "dyadwatch/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::string_view column, std::size_t line) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("column " + std::string(column) + ": '" + std::string(field) + "' is not a number", line);
  }
  return value;
}

int parse_int(std::string_view field, std::string_view column, std::size_t line) {
  const double v = parse_double(field, column, line);
  if (v != static_cast<double>(static_cast<long long>(v)) || v < -1e9 || v > 1e9) {
    throw ParseError("column " + std::string(column) + ": '" + std::string(field) + "' is not an integer", line);
  }
  return static_cast<int>(v);
}

}  // namespace

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

std::string format_double(double v) {
  std::string out;
  append_double(out, v);
  return out;
}

std::size_t Dataset::count(int outcome) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const auto& r) { return r.outcome == outcome; }));
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.outcome);
  return out;
}

Dataset parse_dataset(std::string_view text, const VariableSchema& schema, std::string provenance) {
  Dataset dataset{schema, {}, std::move(provenance)};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t column_count = 0;
  std::size_t col_state_a = 0, col_state_b = 0, col_year = 0, col_outcome = 0;
  std::array<std::size_t, kInputCount> col_values{};

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;  // UTF-8 BOM

  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    if (!have_header) {
      std::map<std::string, std::size_t, std::less<>> by_name;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name(fields[i]);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        if (!by_name.emplace(name, i).second) throw ParseError("duplicate column '" + name + "'", line_no);
      }
      auto require = [&](std::string_view name) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw ParseError("missing column '" + std::string(name) + "'", line_no);
        return it->second;
      };
      col_state_a = require("state_a");
      col_state_b = require("state_b");
      col_year = require("year");
      col_outcome = require("outcome");
      for (std::size_t i = 0; i < schema.size(); ++i) col_values[i] = require(schema[i].name);
      column_count = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != column_count) {
      throw ParseError("expected " + std::to_string(column_count) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    DyadYearRecord record;
    record.state_a = std::string(fields[col_state_a]);
    record.state_b = std::string(fields[col_state_b]);
    if (record.state_a.empty() || record.state_b.empty()) throw ParseError("empty state code", line_no);
    record.year = parse_int(fields[col_year], "year", line_no);
    for (std::size_t i = 0; i < schema.size(); ++i) {
      record.values[i] = parse_double(fields[col_values[i]], schema[i].name, line_no);
    }
    const double outcome = parse_double(fields[col_outcome], "outcome", line_no);
    if (outcome != 0.0 && outcome != 1.0) {
      throw DomainError("outcome must be 0 or 1", "outcome", line_no);
    }
    record.outcome = static_cast<int>(outcome);
    validate_record(schema, record, line_no);
    dataset.records.push_back(std::move(record));
  }
  if (!have_header) throw ParseError("missing header row", 0);
  if (dataset.records.empty()) throw ParseError("dataset has no records", 0);
  return dataset;
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out = "state_a,state_b,year";
  for (const auto& v : dataset.schema.variables()) out += "," + v.name;
  out += ",outcome\n";
  for (const auto& r : dataset.records) {
    out += r.state_a;
    out += ',';
    out += r.state_b;
    out += ',';
    out += std::to_string(r.year);
    for (double v : r.values) {
      out += ',';
      append_double(out, v);
    }
    out += ',';
    out += std::to_string(r.outcome);
    out += '\n';
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const VariableSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open dataset " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), schema, path.filename().string());
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_dataset(dataset);
}

Split balanced_split(const Dataset& dataset, std::size_t n_per_class, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) by_class[dataset.records[i].outcome].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < n_per_class) {
      throw ConfigError("balanced split needs " + std::to_string(n_per_class) + " records with outcome " +
                        std::to_string(c) + ", only " + std::to_string(by_class[c].size()) + " available");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<char> in_train(dataset.records.size(), 0);
  for (auto& indices : by_class) {
    std::shuffle(indices.begin(), indices.end(), rng);
    for (std::size_t k = 0; k < n_per_class; ++k) in_train[indices[k]] = 1;
  }
  Split split;
  split.train.schema = split.test.schema = dataset.schema;
  split.train.provenance = dataset.provenance + " [train seed=" + std::to_string(seed) + "]";
  split.test.provenance = dataset.provenance + " [test seed=" + std::to_string(seed) + "]";
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    (in_train[i] ? split.train : split.test).records.push_back(dataset.records[i]);
  }
  split.empty_test_warning = split.test.empty();
  return split;
}

double ScalingParams::scale(std::size_t i, double raw) const noexcept {
  const double v = (raw - low[i]) / (high[i] - low[i]);
  return std::clamp(v, 0.0, 1.0);
}

double ScalingParams::unscale(std::size_t i, double scaled) const noexcept {
  return low[i] + scaled * (high[i] - low[i]);
}

InputVector ScalingParams::apply(const InputVector& raw) const noexcept {
  InputVector out{};
  for (std::size_t i = 0; i < kInputCount; ++i) out[i] = scale(i, raw[i]);
  return out;
}

ScalingParams fit_scaling(const Dataset& train) {
  if (train.empty()) throw ConfigError("cannot fit scaling on an empty dataset");
  ScalingParams p;
  p.low = p.high = train.records.front().values;
  for (const auto& r : train.records) {
    for (std::size_t i = 0; i < kInputCount; ++i) {
      p.low[i] = std::min(p.low[i], r.values[i]);
      p.high[i] = std::max(p.high[i], r.values[i]);
    }
  }
  for (std::size_t i = 0; i < kInputCount; ++i) {
    if (!(p.high[i] > p.low[i])) p.high[i] = p.low[i] + 1.0;
  }
  return p;
}

InputVector apply_scaling(const ScalingParams& params, const DyadYearRecord& record) {
  return params.apply(record.values);
}

void ScaledData::push_back(std::span<const double> r, double target) {
  if (inputs == 0 && t.empty()) inputs = r.size();
  if (r.size() != inputs) throw ConfigError("row width mismatch in scaled data");
  x.insert(x.end(), r.begin(), r.end());
  t.push_back(target);
}

ScaledData ScaledData::select_columns(std::span<const std::size_t> columns) const {
  ScaledData out;
  out.inputs = columns.size();
  out.x.reserve(size() * columns.size());
  out.t = t;
  for (std::size_t n = 0; n < size(); ++n) {
    const auto r = row(n);
    for (auto c : columns) {
      if (c >= inputs) throw ConfigError("column index out of range");
      out.x.push_back(r[c]);
    }
  }
  return out;
}

ScaledData ScaledData::select_rows(std::span<const std::size_t> rows) const {
  ScaledData out;
  out.inputs = inputs;
  out.x.reserve(rows.size() * inputs);
  out.t.reserve(rows.size());
  for (auto n : rows) {
    const auto r = row(n);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.t.push_back(t[n]);
  }
  return out;
}

ScaledData scale_dataset(const Dataset& dataset, const ScalingParams& params) {
  ScaledData out;
  out.inputs = kInputCount;
  out.x.reserve(dataset.size() * kInputCount);
  out.t.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    const auto s = params.apply(r.values);
    out.x.insert(out.x.end(), s.begin(), s.end());
    out.t.push_back(static_cast<double>(r.outcome));
  }
  return out;
}

std::string fingerprint(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dyadwatch
