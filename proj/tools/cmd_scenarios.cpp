#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "mabkit/config_json.hpp"

namespace mabkit::cli {

int run_scenarios() {
  nlohmann::json doc = nlohmann::json::array();
  for (int id = 1; id <= 3; ++id) {
    doc.push_back(scenario_to_json(scenario_config(id)));
  }
  nlohmann::json out{{"scenarios", doc},
                     {"evaluation_algorithm_scale", kEvaluationAlgorithmScale},
                     {"algorithm_scale_sweep", kAlgorithmScaleSweep}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace mabkit::cli
