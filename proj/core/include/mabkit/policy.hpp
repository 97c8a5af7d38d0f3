#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mabkit/encoding.hpp"
#include "mabkit/posterior.hpp"

namespace mabkit {

/// Which assignment policy produced an observation.
enum class PolicyTag { ContextualTS, UniformRandom };

std::string to_string(PolicyTag tag);
PolicyTag policy_tag_from_string(std::string_view s);

/// Score of every arm of the factor under coefficient vector `coef`:
/// b_i^T coef for each level i.
std::vector<double> arm_scores(const Eigen::VectorXd& coef,
                               const ContextVector& context,
                               const Factor& factor,
                               const FeatureEncoding& enc);

/// Thompson Sampling step: draw one coefficient sample from the posterior
/// and play the arm maximising b_i^T mu_tilde. Ties break to the lowest
/// arm index.
int select_arm_ts(const PosteriorState& state, const ContextVector& context,
                  const Factor& factor, const FeatureEncoding& enc, Rng& rng);

/// Non-adaptive baseline: every level with probability 1/levels.
int select_arm_uniform(const Factor& factor, Rng& rng);

/// Per-observation policy coin flip; p is the probability of ContextualTS.
PolicyTag select_policy(double mixture_p, Rng& rng);

/// Monte Carlo estimate of P(arm = argmax) under the current posterior;
/// the returned probabilities sum to 1.
std::vector<double> arm_selection_probability(const PosteriorState& state,
                                              const ContextVector& context,
                                              const Factor& factor,
                                              const FeatureEncoding& enc,
                                              int n_draws, Rng& rng);

}  // namespace mabkit
