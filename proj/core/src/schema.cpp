#include "dyadwatch/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

bool VariableSpec::contains(double value) const noexcept {
  if (!std::isfinite(value)) return false;
  if (kind == VariableKind::binary) return value == 0.0 || value == 1.0;
  return value >= domain_min && value <= domain_max;
}

std::string_view to_string(VariableKind kind) noexcept {
  switch (kind) {
    case VariableKind::binary: return "binary";
    case VariableKind::ordinal: return "ordinal";
    case VariableKind::continuous: return "continuous";
  }
  return "unknown";
}

std::string_view to_string(PeaceOrientation orientation) noexcept {
  return orientation == PeaceOrientation::high_value_favors_peace ? "high_value_favors_peace"
                                                                  : "low_value_favors_peace";
}

const VariableSchema& VariableSchema::standard() {
  using K = VariableKind;
  constexpr auto high = PeaceOrientation::high_value_favors_peace;
  constexpr auto low = PeaceOrientation::low_value_favors_peace;
  static const VariableSchema schema({
      {"allies", "Allies", K::binary, 0.0, 1.0, high, true},
      {"contiguity", "Contiguity", K::binary, 0.0, 1.0, low, false},
      {"major_power", "MajorPower", K::binary, 0.0, 1.0, low, false},
      // log10 km between capitals
      {"distance", "Distance", K::continuous, 0.0, 5.0, high, false},
      // log10 power ratio, stronger over weaker
      {"capability", "Capability", K::continuous, 0.0, 10.0, high, true},
      // less democratic state of the dyad, 21-point scale
      {"democracy", "Democracy", K::ordinal, -10.0, 10.0, high, true},
      // dyadic trade / GDP of the less dependent state
      {"dependency", "Dependency", K::continuous, 0.0, 1.0, high, true},
  });
  return schema;
}

VariableSchema::VariableSchema(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  if (variables_.size() != kInputCount) {
    throw ConfigError("schema must list exactly " + std::to_string(kInputCount) + " variables");
  }
  std::size_t controllable = 0;
  for (const auto& v : variables_) {
    if (v.kind == VariableKind::binary && (v.domain_min != 0.0 || v.domain_max != 1.0)) {
      throw ConfigError("binary variable " + v.name + " must have domain {0,1}");
    }
    if (!(v.domain_min < v.domain_max)) {
      throw ConfigError("variable " + v.name + " has an empty domain");
    }
    if (v.controllable) ++controllable;
  }
  if (controllable != 4) throw ConfigError("schema must mark exactly 4 controllable variables");
}

std::optional<std::size_t> VariableSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (iequals(variables_[i].name, name) || iequals(variables_[i].label, name)) return i;
  }
  return std::nullopt;
}

std::size_t VariableSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw ConfigError("unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> VariableSchema::controllable_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].controllable) out.push_back(i);
  }
  return out;
}

std::vector<std::string> VariableSchema::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

void validate_record(const VariableSchema& schema, const DyadYearRecord& record, std::size_t line) {
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& spec = schema[i];
    const double v = record.values[i];
    if (!spec.contains(v)) {
      std::string expected = spec.kind == VariableKind::binary
                                 ? "{0,1}"
                                 : "[" + format_value(spec.domain_min) + ", " + format_value(spec.domain_max) + "]";
      throw DomainError(spec.label + " (" + spec.name + ") value " + format_value(v) + " outside " + expected,
                        spec.name, line);
    }
  }
  if (record.outcome != 0 && record.outcome != 1) {
    throw DomainError("outcome must be 0 or 1, got " + std::to_string(record.outcome), "outcome", line);
  }
}

}  // namespace dyadwatch
