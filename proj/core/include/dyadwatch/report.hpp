#pragma once

#include <span>

#include <nlohmann/json.hpp>

#include "dyadwatch/arch_ga.hpp"
#include "dyadwatch/bayes.hpp"
#include "dyadwatch/control.hpp"
#include "dyadwatch/eval.hpp"
#include "dyadwatch/mlp.hpp"

namespace dyadwatch {

nlohmann::json to_json(const MlpArchitecture& arch);
MlpArchitecture architecture_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HmcConfig& config);
HmcConfig hmc_config_from_json(const nlohmann::json& j, HmcConfig defaults = {});
nlohmann::json to_json(const ScalingParams& scaling);
ScalingParams scaling_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ArdResult& ard);
ArdResult ard_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConfusionMatrix& m);
nlohmann::json to_json(const RocCurve& curve);  // endpoint thresholds as null
nlohmann::json to_json(std::span<const ScenarioOutcome> outcomes);
nlohmann::json to_json(const VariableChange& change);
nlohmann::json to_json(const SingleStrategyResult& result);
nlohmann::json to_json(const MultiStrategyResult& result);
nlohmann::json to_json(const CampaignReport& report, bool include_cases = true);
nlohmann::json to_json(const Prediction& prediction, double peace_threshold = 0.5);

// Applies keys present in `j` on top of `base`.
ControlConfig control_config_from_json(const nlohmann::json& j, ControlConfig base = {});
EvidenceConfig evidence_config_from_json(const nlohmann::json& j, EvidenceConfig base = {});
GaConfig ga_config_from_json(const nlohmann::json& j, GaConfig base = {});

}  // namespace dyadwatch
