#pragma once

#include <map>
#include <string>
#include <vector>

#include "mabkit/encoding.hpp"
#include "mabkit/rng.hpp"

namespace mabkit {

/// The 1-to-5 helpfulness rating scale mapped onto [0, 1].
inline const std::vector<double> kRatingGrid{0.0, 0.25, 0.5, 0.75, 1.0};

/// Generative reward specification: a linear mean on named encoding terms,
/// Gaussian noise, and a discretisation grid of attainable values.
struct RewardModel {
  std::map<std::string, double> coefficients;  // term name -> coefficient
  double noise_sd = 1.0 / 6.0;
  std::vector<double> grid = kRatingGrid;
  double missing_prob = 0.0;  // probability a reward is never observed

  void validate(const FeatureEncoding& enc) const;

  /// Expected raw reward for (arm, context): coefficients . b.
  double mean_for(int arm, const ContextVector& context,
                  const FeatureEncoding& enc) const;
};

/// One Normal(mean, noise_sd) draw of the raw (pre-grid) reward.
double raw_reward(const RewardModel& model, const FeatureEncoding& enc,
                  int arm, const ContextVector& context, Rng& rng);

/// Nearest grid value; exact midpoints round to the larger value, and
/// values beyond the ends clamp to the nearest endpoint.
double discretize_reward(double raw, const std::vector<double>& grid);

/// The built-in simulation scenarios over the 2-level Rationale factor:
///   1  no arm difference            r ~ N(0.5, (1/6)^2)
///   2  substantial arm difference   r ~ N(0.5 + i/8, (1/6)^2)
///   3  context-dependent optimum    r ~ N(0.5 + 3/8 i - 1/4 m - 5/8 i*m,
///                                         (1/6)^2)
RewardModel builtin_scenario(int id);

}  // namespace mabkit
