#include "dyadwatch/control.hpp"

#include <algorithm>
#include <cmath>

#include "dyadwatch/error.hpp"
#include "dyadwatch/parallel.hpp"
#include "dyadwatch/seed.hpp"

namespace dyadwatch {

namespace {

// Scaled coordinate -> raw value inside the declared domain. Binary
// variables snap to {0, 1}.
double to_raw(const Predictor& predictor, std::size_t i, double scaled) {
  const auto& spec = predictor.schema()[i];
  double raw = std::clamp(predictor.scaling().unscale(i, scaled), spec.domain_min, spec.domain_max);
  if (spec.kind == VariableKind::binary) raw = raw >= 0.5 ? 1.0 : 0.0;
  return raw;
}

VariableChange make_change(const Predictor& predictor, std::size_t i, double original, double proposed) {
  VariableChange c;
  c.variable = predictor.schema()[i].name;
  c.index = i;
  c.original = original;
  c.proposed = proposed;
  c.original_scaled = predictor.scaling().scale(i, original);
  c.proposed_scaled = predictor.scaling().scale(i, proposed);
  return c;
}

void require_controllable(const Predictor& predictor, std::size_t variable) {
  if (variable >= predictor.schema().size()) throw ConfigError("variable index out of range");
  const auto& spec = predictor.schema()[variable];
  if (!spec.controllable) throw ConfigError(spec.label + " (" + spec.name + ") is not controllable");
}

}  // namespace

void ControlConfig::validate() const {
  if (!(peace_threshold > 0.0 && peace_threshold < 1.0)) throw ConfigError("peace threshold must lie in (0,1)");
  if (!(confidence_min >= 0.0 && confidence_min <= 1.0)) throw ConfigError("confidence_min must lie in [0,1]");
  if (!(gss_tolerance > 0.0)) throw ConfigError("GSS tolerance must be positive");
  sa.validate();
}

SingleStrategyResult control_single(const Predictor& predictor, const DyadYearRecord& record, std::size_t variable,
                                    const ControlConfig& config) {
  config.validate();
  require_controllable(predictor, variable);

  SingleStrategyResult out;
  const double original = record.values[variable];
  const auto before = predictor.predict(record.values);
  out.probability_before = before.probability;
  out.confidence_before = before.confidence;
  out.proposed_case = record.values;
  out.change = make_change(predictor, variable, original, original);
  out.probability_after = before.probability;
  if (before.probability <= config.peace_threshold) {
    out.success = true;
    return out;
  }
  out.optimizer_invoked = true;

  InputVector candidate = record.values;
  auto probability_at = [&](double raw) {
    candidate[variable] = raw;
    return predictor.predict(candidate).probability;
  };

  double proposed = original;
  if (predictor.schema()[variable].kind == VariableKind::binary) {
    const double p0 = probability_at(0.0);
    const double p1 = probability_at(1.0);
    out.objective_evaluations = 2;
    if (p0 != p1) proposed = p0 < p1 ? 0.0 : 1.0;
  } else {
    const auto g = gss_minimize([&](double v) { return probability_at(to_raw(predictor, variable, v)); }, 0.0, 1.0,
                                config.gss_tolerance);
    out.objective_evaluations = g.evaluations;
    proposed = to_raw(predictor, variable, g.x);
  }

  out.proposed_case[variable] = proposed;
  double after = predictor.predict(out.proposed_case).probability;
  if (after > before.probability) {  // a non-unimodal slice can strand GSS
    proposed = original;
    out.proposed_case[variable] = original;
    after = before.probability;
  }
  out.change = make_change(predictor, variable, original, proposed);
  out.probability_after = after;
  out.success = after < config.peace_threshold;
  return out;
}

SingleStrategyResult control_single(const Predictor& predictor, const DyadYearRecord& record,
                                    std::string_view variable, const ControlConfig& config) {
  return control_single(predictor, record, predictor.schema().require_index(variable), config);
}

MultiStrategyResult control_multi(const Predictor& predictor, const DyadYearRecord& record,
                                  const ControlConfig& config) {
  config.validate();
  const auto controls = predictor.schema().controllable_indices();

  MultiStrategyResult out;
  const auto before = predictor.predict(record.values);
  out.probability_before = before.probability;
  out.confidence_before = before.confidence;
  out.probability_after = before.probability;
  out.proposed_case = record.values;
  for (auto i : controls) out.changes.push_back(make_change(predictor, i, record.values[i], record.values[i]));
  if (before.probability <= config.peace_threshold) {
    out.success = true;
    return out;
  }
  out.optimizer_invoked = true;

  std::vector<double> start;
  for (auto i : controls) start.push_back(predictor.scaling().scale(i, record.values[i]));

  // The start point maps back to the original values exactly.
  auto decode = [&](std::span<const double> u) {
    InputVector raw = record.values;
    for (std::size_t k = 0; k < controls.size(); ++k) {
      if (u[k] != start[k]) raw[controls[k]] = to_raw(predictor, controls[k], u[k]);
    }
    return raw;
  };
  const auto sa = sa_minimize([&](std::span<const double> u) { return predictor.predict(decode(u)).probability; },
                              start, config.sa);
  out.objective_evaluations = sa.evaluations;
  out.sa_trace = sa.trace;
  out.proposed_case = decode(sa.x);
  out.probability_after = predictor.predict(out.proposed_case).probability;
  out.changes.clear();
  for (auto i : controls) out.changes.push_back(make_change(predictor, i, record.values[i], out.proposed_case[i]));
  out.success = out.probability_after < config.peace_threshold;
  return out;
}

FilterResult confidence_filter(const Predictor& predictor, std::span<const DyadYearRecord> cases,
                               double peace_threshold, double confidence_min) {
  FilterResult out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto p = predictor.predict(cases[i]);
    if (p.probability <= peace_threshold) continue;
    (p.confidence >= confidence_min ? out.acted_on : out.skipped).push_back(i);
  }
  return out;
}

Strategy Strategy::parse(std::string_view text, const VariableSchema& schema) {
  if (text == "multi") return multi();
  constexpr std::string_view prefix = "single:";
  if (text.starts_with(prefix)) {
    const auto i = schema.require_index(text.substr(prefix.size()));
    if (!schema[i].controllable) throw ConfigError(schema[i].label + " (" + schema[i].name + ") is not controllable");
    return single(i);
  }
  throw ConfigError("unknown strategy '" + std::string(text) + "' (expected multi or single:<variable>)");
}

std::string Strategy::label(const VariableSchema& schema) const {
  return kind == Kind::multi ? std::string("multi") : "single:" + schema[variable].name;
}

CampaignReport control_campaign(const Predictor& predictor, const Dataset& test, const Strategy& strategy,
                                const ControlConfig& config, std::size_t threads) {
  config.validate();
  if (strategy.kind == Strategy::Kind::single) require_controllable(predictor, strategy.variable);

  CampaignReport report;
  report.strategy = strategy.label(predictor.schema());
  const auto filter = confidence_filter(predictor, test.records, config.peace_threshold, config.confidence_min);
  report.n_predicted_conflicts = filter.acted_on.size() + filter.skipped.size();
  report.n_filtered_by_confidence = filter.skipped.size();
  report.n_acted_on = filter.acted_on.size();

  report.cases.resize(filter.acted_on.size());
  parallel_for(filter.acted_on.size(), threads, [&](std::size_t k) {
    const auto index = filter.acted_on[k];
    const auto& record = test.records[index];
    ControlConfig local = config;
    local.sa.seed = derive_seed(config.sa.seed, index);
    CampaignCase c;
    c.case_index = index;
    c.true_conflict = record.outcome == 1;
    if (strategy.kind == Strategy::Kind::single) {
      const auto r = control_single(predictor, record, strategy.variable, local);
      c.probability_before = r.probability_before;
      c.probability_after = r.probability_after;
      c.confidence = r.confidence_before;
      c.success = r.success;
      c.changes = {r.change};
    } else {
      const auto r = control_multi(predictor, record, local);
      c.probability_before = r.probability_before;
      c.probability_after = r.probability_after;
      c.confidence = r.confidence_before;
      c.success = r.success;
      c.changes = r.changes;
    }
    report.cases[k] = std::move(c);
  });

  for (const auto& c : report.cases) {
    (c.true_conflict ? report.acted_true_conflicts : report.acted_false_conflicts)++;
    if (c.success) {
      ++report.n_averted;
      if (c.true_conflict) ++report.averted_true_conflicts;
    }
  }
  if (report.n_acted_on == 0) {
    report.no_action_needed = true;
    report.averted_fraction = 1.0;
  } else {
    report.averted_fraction = static_cast<double>(report.n_averted) / static_cast<double>(report.n_acted_on);
  }
  return report;
}

std::string campaign_csv(const CampaignReport& report) {
  const auto& schema = VariableSchema::standard();
  const auto strategy = Strategy::parse(report.strategy, schema);
  const auto columns =
      strategy.kind == Strategy::Kind::multi ? schema.controllable_indices() : std::vector{strategy.variable};

  std::string out = "case_id,strategy,prob_before,prob_after,success,confidence";
  for (auto i : columns) out += ',' + schema[i].name + "_orig," + schema[i].name + "_new";
  out += '\n';
  for (const auto& c : report.cases) {
    out += std::to_string(c.case_index) + ',' + report.strategy + ',';
    append_double(out, c.probability_before);
    out += ',';
    append_double(out, c.probability_after);
    out += c.success ? ",1," : ",0,";
    append_double(out, c.confidence);
    for (auto i : columns) {
      const auto it = std::find_if(c.changes.begin(), c.changes.end(), [&](const auto& ch) { return ch.index == i; });
      if (it == c.changes.end()) throw Error("campaign case lacks a change for " + schema[i].name);
      out += ',';
      append_double(out, it->original);
      out += ',';
      append_double(out, it->proposed);
    }
    out += '\n';
  }
  return out;
}

}  // namespace dyadwatch
