#pragma once

#include <nlohmann/json_fwd.hpp>

#include "mabkit/scenario.hpp"
#include "mabkit/trial.hpp"

namespace mabkit {

/// Declarative JSON form of a trial configuration, used by config files and
/// run manifests. A manifest's config block reproduces the run bit-for-bit.
nlohmann::json trial_config_to_json(const TrialConfig& config);
TrialConfig trial_config_from_json(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const ScenarioConfig& scenario);

}  // namespace mabkit
