#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadwatch/dataset.hpp"
#include "dyadwatch/optimize.hpp"
#include "dyadwatch/predictor.hpp"

namespace dyadwatch {

struct ControlConfig {
  double peace_threshold = 0.5;
  double confidence_min = 0.0;
  double gss_tolerance = 1e-4;  // scaled units
  SaConfig sa;

  void validate() const;
};

struct VariableChange {
  std::string variable;
  std::size_t index = 0;
  double original = 0.0;  // raw units
  double proposed = 0.0;
  double original_scaled = 0.0;
  double proposed_scaled = 0.0;

  double delta() const noexcept { return proposed - original; }
  double scaled_delta() const noexcept { return proposed_scaled - original_scaled; }
};

struct SingleStrategyResult {
  VariableChange change;
  InputVector proposed_case{};  // raw; only `change.index` may differ from the case
  double probability_before = 0.0;
  double probability_after = 0.0;
  double confidence_before = 0.0;
  bool success = false;
  bool optimizer_invoked = false;
  std::size_t objective_evaluations = 0;
};

struct MultiStrategyResult {
  std::vector<VariableChange> changes;  // Allies, Capability, Democracy, Dependency (schema order)
  InputVector proposed_case{};
  double probability_before = 0.0;
  double probability_after = 0.0;
  double confidence_before = 0.0;
  bool success = false;
  bool optimizer_invoked = false;
  std::size_t objective_evaluations = 0;
  std::vector<double> sa_trace;
};

// Golden-section search on one controllable variable (exhaustive {0,1} for
// binary ones). Runs only when the case is predicted conflict. Success means
// the post-control verdict is peace (probability <= peace_threshold).
SingleStrategyResult control_single(const Predictor& predictor, const DyadYearRecord& record, std::size_t variable,
                                    const ControlConfig& config);
SingleStrategyResult control_single(const Predictor& predictor, const DyadYearRecord& record,
                                    std::string_view variable, const ControlConfig& config);

// Simulated annealing over all controllables jointly.
MultiStrategyResult control_multi(const Predictor& predictor, const DyadYearRecord& record,
                                  const ControlConfig& config);

struct FilterResult {
  std::vector<std::size_t> acted_on;  // record indices
  std::vector<std::size_t> skipped;
};

// Partitions predicted conflicts (p > peace_threshold) by confidence >= confidence_min.
FilterResult confidence_filter(const Predictor& predictor, std::span<const DyadYearRecord> cases,
                               double peace_threshold, double confidence_min);

struct Strategy {
  enum class Kind { single, multi };
  Kind kind = Kind::multi;
  std::size_t variable = 0;  // single only

  static Strategy multi() { return {}; }
  static Strategy single(std::size_t variable) { return {Kind::single, variable}; }
  // "multi" or "single:<variable>"
  static Strategy parse(std::string_view text, const VariableSchema& schema = VariableSchema::standard());
  std::string label(const VariableSchema& schema = VariableSchema::standard()) const;
};

struct CampaignCase {
  std::size_t case_index = 0;
  bool true_conflict = false;  // label of the case
  double probability_before = 0.0;
  double probability_after = 0.0;
  double confidence = 0.0;
  bool success = false;
  std::vector<VariableChange> changes;
};

struct CampaignReport {
  std::string strategy;
  std::size_t n_predicted_conflicts = 0;
  std::size_t n_filtered_by_confidence = 0;
  std::size_t n_acted_on = 0;
  std::size_t n_averted = 0;
  std::size_t acted_true_conflicts = 0;
  std::size_t acted_false_conflicts = 0;
  std::size_t averted_true_conflicts = 0;
  double averted_fraction = 1.0;
  bool no_action_needed = false;  // nothing to act on; averted_fraction reported as 1
  std::vector<CampaignCase> cases;
};

// Per-case annealing seeds derive from (config.sa.seed, case index).
CampaignReport control_campaign(const Predictor& predictor, const Dataset& test, const Strategy& strategy,
                                const ControlConfig& config, std::size_t threads = 1);

// case_id,strategy,prob_before,prob_after,success,confidence,<var>_orig,<var>_new,...
std::string campaign_csv(const CampaignReport& report);

}  // namespace dyadwatch
