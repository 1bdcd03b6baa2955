#include <doctest.h>

#include <cmath>
#include <set>

#include "dyadwatch/dataset.hpp"
#include "dyadwatch/error.hpp"
#include "dyadwatch/synth.hpp"

using namespace dyadwatch;

namespace {

const char* kHeader = "state_a,state_b,year,allies,contiguity,major_power,distance,capability,democracy,dependency,outcome\n";

}  // namespace

TEST_CASE("standard schema order, kinds and controllables") {
  const auto& s = VariableSchema::standard();
  REQUIRE(s.size() == kInputCount);
  CHECK(s.names() == std::vector<std::string>{"allies", "contiguity", "major_power", "distance", "capability",
                                              "democracy", "dependency"});
  CHECK(s[index(Var::allies)].kind == VariableKind::binary);
  CHECK(s[index(Var::democracy)].kind == VariableKind::ordinal);
  CHECK(s[index(Var::contiguity)].orientation == PeaceOrientation::low_value_favors_peace);
  CHECK(s[index(Var::major_power)].orientation == PeaceOrientation::low_value_favors_peace);
  CHECK(s.controllable_indices() == std::vector<std::size_t>{0, 4, 5, 6});
  CHECK(s.index_of("Democracy") == index(Var::democracy));
  CHECK(s.index_of("DEPENDENCY") == index(Var::dependency));
  CHECK_FALSE(s.index_of("gdp").has_value());
  CHECK_THROWS_AS(s.require_index("gdp"), ConfigError);
}

TEST_CASE("domain violations name the variable") {
  DyadYearRecord r;
  r.values = {1, 0, 0, 2, 1, 11, 0.1};
  try {
    validate_record(VariableSchema::standard(), r, 4);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.variable() == "democracy");
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("Democracy") != std::string::npos);
  }
  r.values = {0.5, 0, 0, 2, 1, 1, 0.1};
  CHECK_THROWS_AS(validate_record(VariableSchema::standard(), r), DomainError);
}

TEST_CASE("CSV parse and serialize round-trip exactly") {
  const auto d = synth_generate(SynthConfig::separable(50), 11);
  const auto text = serialize_dataset(d);
  const auto back = parse_dataset(text);
  CHECK(back.records == d.records);
  CHECK(serialize_dataset(back) == text);
  CHECK(fingerprint(text) == fingerprint(serialize_dataset(back)));
  CHECK(fingerprint(text).size() == 16);
}

TEST_CASE("columns are matched by header name") {
  const std::string text =
      "outcome,dependency,democracy,capability,distance,major_power,contiguity,allies,year,state_b,state_a\n"
      "1,0.25,-3,2.5,1.5,1,1,0,1990,20,10\n";
  const auto d = parse_dataset(text);
  REQUIRE(d.size() == 1);
  const auto& r = d.records[0];
  CHECK(r.state_a == "10");
  CHECK(r.year == 1990);
  CHECK(r.outcome == 1);
  CHECK(r.values == InputVector{0, 1, 1, 1.5, 2.5, -3, 0.25});
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("bad number") {
    const std::string text = std::string(kHeader) + "1,2,1990,1,0,0,2,1,3,0.1,0\n1,2,1991,1,0,0,abc,1,3,0.1,0\n";
    try {
      parse_dataset(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("domain violation") {
    const std::string text = std::string(kHeader) + "1,2,1990,1,0,0,2,1,12,0.1,0\n";
    try {
      parse_dataset(text);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(e.variable() == "democracy");
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("missing column") {
    CHECK_THROWS_AS(parse_dataset("state_a,state_b,year,allies,outcome\n1,2,3,0,1\n"), ParseError);
  }
  SUBCASE("wrong field count") {
    CHECK_THROWS_AS(parse_dataset(std::string(kHeader) + "1,2,1990,1,0,0,2,1,3,0.1\n"), ParseError);
  }
  SUBCASE("outcome outside {0,1}") {
    CHECK_THROWS(parse_dataset(std::string(kHeader) + "1,2,1990,1,0,0,2,1,3,0.1,2\n"));
  }
  SUBCASE("no records") { CHECK_THROWS(parse_dataset(kHeader)); }
}

TEST_CASE("balanced split is exact, disjoint and seeded") {
  const auto d = synth_generate(SynthConfig::separable(600), 3);
  const auto s = balanced_split(d, 100, 9);
  CHECK(s.train.count(1) == 100);
  CHECK(s.train.count(0) == 100);
  CHECK(s.test.size() == d.size() - 200);
  CHECK_FALSE(s.empty_test_warning);

  std::multiset<std::string> all, parts;
  for (const auto& r : d.records) all.insert(r.state_a + "/" + r.state_b + "/" + std::to_string(r.year));
  for (const auto* part : {&s.train, &s.test}) {
    for (const auto& r : part->records) parts.insert(r.state_a + "/" + r.state_b + "/" + std::to_string(r.year));
  }
  CHECK(all == parts);

  CHECK(balanced_split(d, 100, 9).train.records == s.train.records);
  CHECK(balanced_split(d, 100, 10).train.records != s.train.records);
  CHECK_THROWS_AS(balanced_split(d, 400, 9), ConfigError);
  CHECK(balanced_split(d, 300, 1).empty_test_warning);
}

TEST_CASE("scaling maps training data into the unit box") {
  const auto d = synth_generate(SynthConfig::separable(300), 5);
  const auto p = fit_scaling(d);
  const auto x = scale_dataset(d, p);
  CHECK(x.inputs == kInputCount);
  CHECK(x.size() == d.size());
  for (double v : x.x) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (std::size_t i = 0; i < kInputCount; ++i) {
    CHECK(p.unscale(i, p.scale(i, d.records[7].values[i])) == doctest::Approx(d.records[7].values[i]).epsilon(1e-12));
    CHECK(p.scale(i, p.high[i] + 100.0) == 1.0);
    CHECK(p.scale(i, p.low[i] - 100.0) == 0.0);
  }
}

TEST_CASE("scaled data column and row selection") {
  ScaledData x;
  x.push_back(std::vector<double>{1, 2, 3}, 0);
  x.push_back(std::vector<double>{4, 5, 6}, 1);
  const std::vector<std::size_t> cols{2, 0};
  const auto c = x.select_columns(cols);
  CHECK(c.inputs == 2);
  CHECK(c.x == std::vector<double>{3, 1, 6, 4});
  const std::vector<std::size_t> rows{1};
  const auto r = x.select_rows(rows);
  CHECK(r.x == std::vector<double>{4, 5, 6});
  CHECK(r.t == std::vector<double>{1});
  CHECK_THROWS(x.push_back(std::vector<double>{1, 2}, 0));
}

TEST_CASE("synthetic generator honours balance, ranges and seed") {
  const auto cfg = SynthConfig::separable(1000);
  const auto a = synth_generate(cfg, 42);
  const auto b = synth_generate(cfg, 42);
  CHECK(a.records == b.records);
  CHECK(a.count(1) == 500);
  for (const auto& r : a.records) {
    CHECK_NOTHROW(validate_record(a.schema, r));
    for (std::size_t i = 0; i < kInputCount; ++i) {
      CHECK(r.values[i] >= synth_ranges()[i].low);
      CHECK(r.values[i] <= synth_ranges()[i].high);
    }
    CHECK(r.values[index(Var::democracy)] == std::round(r.values[index(Var::democracy)]));
  }
  CHECK(synth_generate(cfg, 43).records != a.records);
}

TEST_CASE("synthetic truth is monotone along peace directions") {
  const auto cfg = SynthConfig::separable(10);
  InputVector lo{}, hi{};
  for (std::size_t i = 0; i < kInputCount; ++i) {
    const auto& spec = VariableSchema::standard()[i];
    lo[i] = spec.peace_min(synth_ranges()[i].low, synth_ranges()[i].high);
    hi[i] = spec.peace_max(synth_ranges()[i].low, synth_ranges()[i].high);
    CHECK(peace_coordinate(i, lo[i]) == doctest::Approx(0.0));
    CHECK(peace_coordinate(i, hi[i]) == doctest::Approx(1.0));
  }
  const double p_lo = true_dispute_probability(cfg, lo);
  for (std::size_t i = 0; i < kInputCount; ++i) {
    InputVector v = lo;
    v[i] = hi[i];
    CHECK(true_dispute_probability(cfg, v) < p_lo);
  }
  CHECK(true_dispute_probability(cfg, hi) < 0.01);
  CHECK(p_lo > 0.99);
}

TEST_CASE("synthetic config validation") {
  auto cfg = SynthConfig::separable(10);
  cfg.coefficients[0] = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig::separable(0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig::noise(200);
  CHECK_FALSE(cfg.balance.has_value());
  CHECK_NOTHROW(synth_generate(cfg, 1));
}
