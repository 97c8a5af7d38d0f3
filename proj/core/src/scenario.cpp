#include "mabkit/scenario.hpp"

#include "mabkit/errors.hpp"

namespace mabkit {

ScenarioConfig scenario_config(int id) {
  ScenarioConfig sc;
  sc.id = id;
  sc.trial.factor = Factor{"Rationale", 2, {"absent", "present"}};
  sc.trial.context = ContextSchema::binary({"Mood"});
  sc.trial.reward = builtin_scenario(id);
  switch (id) {
    case 1:
      sc.name = "no-arm-difference";
      sc.trial.encoding = FeatureEncoding::standard(sc.trial.factor, {});
      sc.effect_names = {"Rationale"};
      sc.analysis_scale = kScenario12AnalysisScale;
      break;
    case 2:
      sc.name = "arm-difference";
      sc.trial.encoding = FeatureEncoding::standard(sc.trial.factor, {});
      sc.effect_names = {"Rationale"};
      sc.analysis_scale = kScenario12AnalysisScale;
      break;
    case 3:
      sc.name = "context-dependent-optimum";
      sc.trial.encoding =
          FeatureEncoding::standard(sc.trial.factor, {"Mood"}, true);
      sc.effect_names = {"Rationale", "Mood", "Rationale*Mood"};
      sc.analysis_scale = kScenario3AnalysisScale;
      break;
    default:
      throw ValidationError("unknown scenario id " + std::to_string(id) +
                            " (valid: 1, 2, 3)");
  }
  return sc;
}

}  // namespace mabkit
