#include "dyadwatch/report.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string_view>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view what, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown " + std::string(what) + " field '" + key + "'");
    }
  }
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    field = v.get<double>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
    }
    field = v.get<T>();
  } else {
    field = v.get<T>();
  }
}

json values_by_name(const InputVector& values) {
  const auto& schema = VariableSchema::standard();
  json out = json::object();
  for (std::size_t i = 0; i < kInputCount; ++i) out[schema[i].name] = values[i];
  return out;
}

json changes_json(const std::vector<VariableChange>& changes) {
  json out = json::array();
  for (const auto& c : changes) out.push_back(to_json(c));
  return out;
}

}  // namespace

json to_json(const MlpArchitecture& arch) {
  return {{"inputs", arch.inputs},
          {"hidden", arch.hidden},
          {"outputs", arch.outputs},
          {"hidden_activation", std::string(to_string(arch.hidden_activation))},
          {"output_activation", std::string(to_string(arch.output_activation))}};
}

MlpArchitecture architecture_from_json(const json& j) {
  reject_unknown(j, "architecture", {"inputs", "hidden", "outputs", "hidden_activation", "output_activation"});
  MlpArchitecture arch;
  take(j, "inputs", arch.inputs);
  take(j, "hidden", arch.hidden);
  take(j, "outputs", arch.outputs);
  if (j.contains("hidden_activation")) {
    arch.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
  }
  if (j.contains("output_activation")) {
    arch.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
  }
  arch.validate();
  return arch;
}

json to_json(const HmcConfig& c) {
  return {{"step_size", c.step_size},     {"leapfrog_steps", c.leapfrog_steps}, {"samples", c.samples},
          {"burn_in", c.burn_in},         {"thinning", c.thinning},             {"temperature", c.temperature},
          {"seed", c.seed}};
}

HmcConfig hmc_config_from_json(const json& j, HmcConfig c) {
  reject_unknown(j, "hmc", {"step_size", "leapfrog_steps", "samples", "burn_in", "thinning", "temperature", "seed"});
  take(j, "step_size", c.step_size);
  take(j, "leapfrog_steps", c.leapfrog_steps);
  take(j, "samples", c.samples);
  take(j, "burn_in", c.burn_in);
  take(j, "thinning", c.thinning);
  take(j, "temperature", c.temperature);
  take(j, "seed", c.seed);
  c.validate();
  return c;
}

json to_json(const ScalingParams& s) { return {{"low", s.low}, {"high", s.high}}; }

ScalingParams scaling_from_json(const json& j) {
  ScalingParams s;
  const auto low = j.at("low").get<std::vector<double>>();
  const auto high = j.at("high").get<std::vector<double>>();
  if (low.size() != kInputCount || high.size() != kInputCount) throw ConfigError("scaling must list 7 bounds");
  for (std::size_t i = 0; i < kInputCount; ++i) {
    if (!(high[i] > low[i])) throw ConfigError("scaling bounds must satisfy high > low");
    s.low[i] = low[i];
    s.high[i] = high[i];
  }
  return s;
}

json to_json(const ArdResult& ard) {
  json ranking = json::array();
  for (auto i : ard.ranking) ranking.push_back(ard.inputs.at(i));
  return {{"inputs", ard.inputs},
          {"input_alphas", ard.input_alphas},
          {"shared_alphas", ard.shared_alphas},
          {"relevance", ard.relevance},
          {"ranking", ranking}};
}

ArdResult ard_from_json(const json& j) {
  ArdResult ard;
  ard.inputs = j.at("inputs").get<std::vector<std::string>>();
  ard.input_alphas = j.at("input_alphas").get<std::vector<double>>();
  ard.shared_alphas = j.at("shared_alphas").get<std::vector<double>>();
  ard.relevance = j.at("relevance").get<std::vector<double>>();
  for (const auto& name : j.at("ranking").get<std::vector<std::string>>()) {
    const auto it = std::find(ard.inputs.begin(), ard.inputs.end(), name);
    if (it == ard.inputs.end()) throw ConfigError("ARD ranking names an unknown input '" + name + "'");
    ard.ranking.push_back(static_cast<std::size_t>(it - ard.inputs.begin()));
  }
  if (ard.input_alphas.size() != ard.inputs.size() || ard.relevance.size() != ard.inputs.size() ||
      ard.ranking.size() != ard.inputs.size()) {
    throw ConfigError("ARD arrays differ in length");
  }
  return ard;
}

json to_json(const ConfusionMatrix& m) {
  json j = {{"TC", m.true_conflict}, {"FP", m.false_peace},    {"TP", m.true_peace},
            {"FC", m.false_conflict}, {"threshold", m.threshold}, {"total", m.total()}};
  if (m.true_conflict + m.false_peace > 0 && m.true_peace + m.false_conflict > 0) {
    const auto r = true_rates(m);
    j["true_positive_rate"] = r.true_positive_rate;
    j["true_negative_rate"] = r.true_negative_rate;
  }
  return j;
}

json to_json(const RocCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"threshold", std::isfinite(p.threshold) ? json(p.threshold) : json(nullptr)},
                      {"dispute_acc", p.dispute_accuracy},
                      {"peace_acc", p.peace_accuracy}});
  }
  return {{"points", points}, {"auc", auc(curve)}};
}

json to_json(std::span<const ScenarioOutcome> outcomes) {
  json out = json::array();
  for (const auto& s : outcomes) {
    out.push_back({{"scenario", s.label},
                   {"inputs", values_by_name(s.raw)},
                   {"scaled", s.scaled},
                   {"probability", s.probability},
                   {"verdict", s.conflict ? "conflict" : "peace"}});
  }
  return out;
}

json to_json(const VariableChange& c) {
  return {{"variable", c.variable},
          {"original", c.original},
          {"proposed", c.proposed},
          {"delta", c.delta()},
          {"original_scaled", c.original_scaled},
          {"proposed_scaled", c.proposed_scaled},
          {"scaled_delta", c.scaled_delta()}};
}

json to_json(const SingleStrategyResult& r) {
  return {{"strategy", "single"},
          {"variable", r.change.variable},
          {"change", to_json(r.change)},
          {"proposed_case", values_by_name(r.proposed_case)},
          {"probability_before", r.probability_before},
          {"probability_after", r.probability_after},
          {"confidence_before", r.confidence_before},
          {"success", r.success},
          {"optimizer_invoked", r.optimizer_invoked},
          {"objective_evaluations", r.objective_evaluations}};
}

json to_json(const MultiStrategyResult& r) {
  return {{"strategy", "multi"},
          {"changes", changes_json(r.changes)},
          {"proposed_case", values_by_name(r.proposed_case)},
          {"probability_before", r.probability_before},
          {"probability_after", r.probability_after},
          {"confidence_before", r.confidence_before},
          {"success", r.success},
          {"optimizer_invoked", r.optimizer_invoked},
          {"objective_evaluations", r.objective_evaluations},
          {"sa_trace", r.sa_trace}};
}

json to_json(const CampaignReport& r, bool include_cases) {
  json j = {{"strategy", r.strategy},
            {"n_predicted_conflicts", r.n_predicted_conflicts},
            {"n_filtered_by_confidence", r.n_filtered_by_confidence},
            {"n_acted_on", r.n_acted_on},
            {"n_averted", r.n_averted},
            {"acted_true_conflicts", r.acted_true_conflicts},
            {"acted_false_conflicts", r.acted_false_conflicts},
            {"averted_true_conflicts", r.averted_true_conflicts},
            {"averted_fraction", r.averted_fraction},
            {"no_action_needed", r.no_action_needed}};
  if (include_cases) {
    json cases = json::array();
    for (const auto& c : r.cases) {
      cases.push_back({{"case_index", c.case_index},
                       {"true_conflict", c.true_conflict},
                       {"probability_before", c.probability_before},
                       {"probability_after", c.probability_after},
                       {"confidence", c.confidence},
                       {"success", c.success},
                       {"changes", changes_json(c.changes)}});
    }
    j["cases"] = std::move(cases);
  }
  return j;
}

json to_json(const Prediction& p, double peace_threshold) {
  return {{"probability", p.probability},
          {"confidence", p.confidence},
          {"verdict", p.probability > peace_threshold ? "conflict" : "peace"}};
}

ControlConfig control_config_from_json(const json& j, ControlConfig c) {
  reject_unknown(j, "control config", {"peace_threshold", "confidence_min", "gss_tolerance", "sa"});
  take(j, "peace_threshold", c.peace_threshold);
  take(j, "confidence_min", c.confidence_min);
  take(j, "gss_tolerance", c.gss_tolerance);
  if (j.contains("sa")) {
    const auto& sa = j.at("sa");
    reject_unknown(sa, "sa",
                   {"initial_temperature", "cooling_factor", "steps", "proposal_scale", "seed", "epoch_length"});
    take(sa, "initial_temperature", c.sa.initial_temperature);
    take(sa, "cooling_factor", c.sa.cooling_factor);
    take(sa, "steps", c.sa.steps);
    take(sa, "proposal_scale", c.sa.proposal_scale);
    take(sa, "seed", c.sa.seed);
    take(sa, "epoch_length", c.sa.epoch_length);
  }
  c.validate();
  return c;
}

EvidenceConfig evidence_config_from_json(const json& j, EvidenceConfig c) {
  reject_unknown(j, "evidence config",
                 {"outer_iterations", "initial_alpha", "beta", "groups", "alpha_tolerance", "init_scale",
                  "inner_iterations"});
  take(j, "outer_iterations", c.outer_iterations);
  take(j, "initial_alpha", c.initial_alpha);
  take(j, "beta", c.beta);
  if (j.contains("groups")) c.groups = group_layout_from_string(j.at("groups").get<std::string>());
  take(j, "alpha_tolerance", c.alpha_tolerance);
  take(j, "init_scale", c.init_scale);
  take(j, "inner_iterations", c.inner.max_iterations);
  c.validate();
  return c;
}

GaConfig ga_config_from_json(const json& j, GaConfig c) {
  reject_unknown(j, "ga config",
                 {"population_size", "generations", "crossover_rate", "mutation_rate", "r", "elitism", "folds",
                  "seed", "weight_decay", "training_iterations"});
  take(j, "population_size", c.population_size);
  take(j, "generations", c.generations);
  take(j, "crossover_rate", c.crossover_rate);
  take(j, "mutation_rate", c.mutation_rate);
  take(j, "r", c.r);
  take(j, "elitism", c.elitism);
  take(j, "folds", c.folds);
  take(j, "seed", c.seed);
  take(j, "weight_decay", c.fitness.weight_decay);
  take(j, "training_iterations", c.fitness.training.max_iterations);
  c.validate();
  return c;
}

}  // namespace dyadwatch
