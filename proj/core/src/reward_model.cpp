#include "mabkit/reward_model.hpp"

#include <algorithm>
#include <cmath>

#include "mabkit/errors.hpp"

namespace mabkit {

void RewardModel::validate(const FeatureEncoding& enc) const {
  if (grid.empty()) throw ValidationError("reward grid must be non-empty");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw ValidationError("reward grid must be strictly increasing");
  }
  if (!(noise_sd > 0.0)) throw ValidationError("noise_sd must be positive");
  if (!(missing_prob >= 0.0 && missing_prob <= 1.0)) {
    throw ValidationError("missing_prob must lie in [0, 1]");
  }
  for (const auto& [name, coef] : coefficients) {
    (void)coef;
    if (!enc.term_index(name)) {
      throw ValidationError("reward coefficient '" + name +
                            "' names no encoding term");
    }
  }
}

double RewardModel::mean_for(int arm, const ContextVector& context,
                             const FeatureEncoding& enc) const {
  double mean = 0.0;
  for (const auto& [name, coef] : coefficients) {
    auto idx = enc.term_index(name);
    if (!idx) {
      throw ValidationError("reward coefficient '" + name +
                            "' names no encoding term");
    }
    mean += coef * enc.term_value(enc.terms()[*idx], arm, context);
  }
  return mean;
}

double raw_reward(const RewardModel& model, const FeatureEncoding& enc,
                  int arm, const ContextVector& context, Rng& rng) {
  return rng.normal(model.mean_for(arm, context, enc), model.noise_sd);
}

double discretize_reward(double raw, const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("reward grid must be non-empty");
  // First grid value whose midpoint with its predecessor lies beyond raw;
  // raw exactly at a midpoint belongs to the larger value.
  std::size_t pick = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double midpoint = 0.5 * (grid[i - 1] + grid[i]);
    if (raw >= midpoint) pick = i;
  }
  return grid[pick];
}

RewardModel builtin_scenario(int id) {
  RewardModel model;
  model.noise_sd = 1.0 / 6.0;
  model.grid = kRatingGrid;
  switch (id) {
    case 1:
      model.coefficients = {{"intercept", 0.5}};
      return model;
    case 2:
      model.coefficients = {{"intercept", 0.5}, {"Rationale", 1.0 / 8.0}};
      return model;
    case 3:
      model.coefficients = {{"intercept", 0.5},
                            {"Rationale", 3.0 / 8.0},
                            {"Mood", -1.0 / 4.0},
                            {"Rationale*Mood", -5.0 / 8.0}};
      return model;
    default:
      throw ValidationError("unknown scenario id " + std::to_string(id) +
                            " (valid: 1, 2, 3)");
  }
}

}  // namespace mabkit
