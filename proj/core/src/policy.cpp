#include "mabkit/policy.hpp"

#include <algorithm>

#include "mabkit/errors.hpp"

namespace mabkit {

std::string to_string(PolicyTag tag) {
  return tag == PolicyTag::ContextualTS ? "ContextualTS" : "UniformRandom";
}

PolicyTag policy_tag_from_string(std::string_view s) {
  if (s == "ContextualTS") return PolicyTag::ContextualTS;
  if (s == "UniformRandom") return PolicyTag::UniformRandom;
  throw ParseError("unknown policy tag '" + std::string(s) + "'");
}

std::vector<double> arm_scores(const Eigen::VectorXd& coef,
                               const ContextVector& context,
                               const Factor& factor,
                               const FeatureEncoding& enc) {
  std::vector<double> scores(factor.levels);
  for (int arm = 0; arm < factor.levels; ++arm) {
    scores[arm] = enc.encode(arm, context).dot(coef);
  }
  return scores;
}

namespace {

int argmax_lowest_index(const std::vector<double>& scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace

int select_arm_ts(const PosteriorState& state, const ContextVector& context,
                  const Factor& factor, const FeatureEncoding& enc, Rng& rng) {
  const Eigen::VectorXd mu_tilde = state.sample(rng);
  return argmax_lowest_index(arm_scores(mu_tilde, context, factor, enc));
}

int select_arm_uniform(const Factor& factor, Rng& rng) {
  if (factor.levels < 1) {
    throw ValidationError("factor '" + factor.name + "' has no levels");
  }
  return static_cast<int>(rng.uniform_int(factor.levels));
}

PolicyTag select_policy(double mixture_p, Rng& rng) {
  if (!(mixture_p >= 0.0 && mixture_p <= 1.0)) {
    throw ValidationError("policy mixture probability must lie in [0, 1]");
  }
  return rng.bernoulli(mixture_p) ? PolicyTag::ContextualTS
                                  : PolicyTag::UniformRandom;
}

std::vector<double> arm_selection_probability(const PosteriorState& state,
                                              const ContextVector& context,
                                              const Factor& factor,
                                              const FeatureEncoding& enc,
                                              int n_draws, Rng& rng) {
  if (n_draws < 1) throw ValidationError("n_draws must be >= 1");
  // Features are fixed per (arm, context); only the coefficient draw varies.
  std::vector<Eigen::VectorXd> features;
  features.reserve(factor.levels);
  for (int arm = 0; arm < factor.levels; ++arm) {
    features.push_back(enc.encode(arm, context));
  }
  std::vector<long> wins(factor.levels, 0);
  std::vector<double> scores(factor.levels);
  for (int draw = 0; draw < n_draws; ++draw) {
    const Eigen::VectorXd mu_tilde = state.sample(rng);
    for (int arm = 0; arm < factor.levels; ++arm) {
      scores[arm] = features[arm].dot(mu_tilde);
    }
    ++wins[argmax_lowest_index(scores)];
  }
  std::vector<double> probs(factor.levels);
  for (int arm = 0; arm < factor.levels; ++arm) {
    probs[arm] = static_cast<double>(wins[arm]) / n_draws;
  }
  return probs;
}

}  // namespace mabkit
