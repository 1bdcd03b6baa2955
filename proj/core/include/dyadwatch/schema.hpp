#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyadwatch {

inline constexpr std::size_t kInputCount = 7;

// Raw input vector in canonical schema order.
using InputVector = std::array<double, kInputCount>;

enum class VariableKind { binary, ordinal, continuous };

enum class PeaceOrientation { high_value_favors_peace, low_value_favors_peace };

// Canonical column positions. The order is the input order of every network.
enum class Var : std::size_t {
  allies = 0,
  contiguity = 1,
  major_power = 2,
  distance = 3,
  capability = 4,
  democracy = 5,
  dependency = 6,
};

constexpr std::size_t index(Var v) noexcept { return static_cast<std::size_t>(v); }

struct VariableSpec {
  std::string name;   // CSV column name
  std::string label;  // display name
  VariableKind kind = VariableKind::continuous;
  double domain_min = 0.0;
  double domain_max = 1.0;
  PeaceOrientation orientation = PeaceOrientation::high_value_favors_peace;
  bool controllable = false;

  bool contains(double value) const noexcept;
  // Raw value that is most peace-favoring within [low, high].
  double peace_max(double low, double high) const noexcept {
    return orientation == PeaceOrientation::high_value_favors_peace ? high : low;
  }
  double peace_min(double low, double high) const noexcept {
    return orientation == PeaceOrientation::high_value_favors_peace ? low : high;
  }

  bool operator==(const VariableSpec&) const = default;
};

std::string_view to_string(VariableKind kind) noexcept;
std::string_view to_string(PeaceOrientation orientation) noexcept;

class VariableSchema {
 public:
  // Allies, Contiguity, MajorPower, Distance, Capability, Democracy, Dependency.
  static const VariableSchema& standard();

  explicit VariableSchema(std::vector<VariableSpec> variables);

  std::size_t size() const noexcept { return variables_.size(); }
  const VariableSpec& operator[](std::size_t i) const { return variables_.at(i); }
  std::span<const VariableSpec> variables() const noexcept { return variables_; }

  // Accepts the column name or the display label, case-insensitively.
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;
  std::vector<std::size_t> controllable_indices() const;
  std::vector<std::string> names() const;

  bool operator==(const VariableSchema&) const = default;

 private:
  std::vector<VariableSpec> variables_;
};

struct DyadYearRecord {
  std::string state_a;
  std::string state_b;
  int year = 0;
  InputVector values{};
  int outcome = 0;  // 1 = dispute onset

  bool operator==(const DyadYearRecord&) const = default;
};

// Throws DomainError naming the first offending variable.
void validate_record(const VariableSchema& schema, const DyadYearRecord& record, std::size_t line = 0);

}  // namespace dyadwatch
