#include <cmath>
#include <doctest.h>
#include <nlohmann/json.hpp>

#include "mabkit/errors.hpp"
#include "mabkit/policy.hpp"

using namespace mabkit;

namespace {

const Factor kRationale{"Rationale", 2, {"absent", "present"}};

FeatureEncoding mood_encoding() {
  return FeatureEncoding::standard(kRationale, {"Mood"}, true);
}

ContextVector mood(double value) {
  ContextVector ctx;
  ctx.set("Mood", value);
  return ctx;
}

/// Posterior whose mean is exactly `mu` (B = I so mu_hat = f) and whose
/// draws collapse onto it when v is tiny.
PosteriorState state_with_mean(const std::vector<double>& mu, double v) {
  const auto d = mu.size();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> row(d, 0.0);
    row[i] = 1.0;
    rows.push_back(row);
  }
  return PosteriorState::from_json(
      nlohmann::json{{"B", rows}, {"f", mu}, {"v", v}, {"n_obs", 0}});
}

}  // namespace

TEST_CASE("policy tags round-trip through their names") {
  CHECK(to_string(PolicyTag::ContextualTS) == "ContextualTS");
  CHECK(policy_tag_from_string("UniformRandom") == PolicyTag::UniformRandom);
  CHECK_THROWS_AS(policy_tag_from_string("nope"), ParseError);
}

TEST_CASE("arm scores are the per-arm feature dot products") {
  const auto enc = mood_encoding();
  Eigen::VectorXd mu(4);
  mu << 0.0, 0.5, 0.0, -1.0;
  const auto low = arm_scores(mu, mood(0.0), kRationale, enc);
  CHECK(low[0] == 0.0);
  CHECK(low[1] == 0.5);
  const auto high = arm_scores(mu, mood(1.0), kRationale, enc);
  CHECK(high[0] == 0.0);
  CHECK(high[1] == -0.5);
}

TEST_CASE("TS plays the argmax of the sampled scores") {
  const auto enc = mood_encoding();
  Rng rng(1);
  // Positive arm effect, mood off -> arm 1.
  auto favour1 = state_with_mean({0.0, 0.5, 0.0, 0.0}, 1e-12);
  CHECK(select_arm_ts(favour1, mood(0.0), kRationale, enc, rng) == 1);
  // Interaction flips the preference when mood is on -> arm 0.
  auto flip = state_with_mean({0.0, 0.5, 0.0, -1.0}, 1e-12);
  CHECK(select_arm_ts(flip, mood(1.0), kRationale, enc, rng) == 0);
}

TEST_CASE("exact ties break to the lowest arm index") {
  // An encoding with no arm-specific terms scores every arm identically,
  // so the draw is an exact tie no matter what it samples.
  auto tied = FeatureEncoding::from_terms(
      kRationale, {{EncodingTerm::Kind::Intercept, -1, "", "intercept"},
                   {EncodingTerm::Kind::Context, -1, "Mood", "Mood"}});
  const PosteriorState state(2, 1.0);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    CHECK(select_arm_ts(state, mood(1.0), kRationale, tied, rng) == 0);
  }
}

TEST_CASE("uniform selection is uniform") {
  Rng rng(3);
  const Factor single{"Solo", 1};
  for (int i = 0; i < 100; ++i) CHECK(select_arm_uniform(single, rng) == 0);

  const int n = 100000;
  long ones = 0;
  for (int i = 0; i < n; ++i) ones += select_arm_uniform(kRationale, rng);
  CHECK(std::fabs(static_cast<double>(ones) / n - 0.5) < 0.01);

  const Factor four{"InteractionType", 4};
  std::vector<long> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[select_arm_uniform(four, rng)];
  for (long c : counts) {
    CHECK(std::fabs(static_cast<double>(c) / n - 0.25) < 0.01);
  }
}

TEST_CASE("policy mixture honours its probability") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    CHECK(select_policy(1.0, rng) == PolicyTag::ContextualTS);
    CHECK(select_policy(0.0, rng) == PolicyTag::UniformRandom);
  }
  const int n = 100000;
  long ts = 0;
  for (int i = 0; i < n; ++i) {
    ts += select_policy(0.5, rng) == PolicyTag::ContextualTS;
  }
  CHECK(std::fabs(static_cast<double>(ts) / n - 0.5) < 0.01);
  CHECK_THROWS_AS(select_policy(1.5, rng), ValidationError);
  CHECK_THROWS_AS(select_policy(-0.1, rng), ValidationError);
}

TEST_CASE("selection probabilities: symmetry, dominance, degeneracy") {
  const auto enc = mood_encoding();
  Rng rng(5);

  const PosteriorState fresh(4, 1.0);
  const auto symmetric =
      arm_selection_probability(fresh, mood(0.0), kRationale, enc, 10000, rng);
  CHECK(symmetric[0] + symmetric[1] == doctest::Approx(1.0));
  CHECK(std::fabs(symmetric[1] - 0.5) < 2.0 / std::sqrt(10000.0));

  auto dominant = state_with_mean({0.0, 10.0, 0.0, 0.0}, 1.0);
  const auto probs = arm_selection_probability(dominant, mood(0.0), kRationale,
                                               enc, 10000, rng);
  CHECK(probs[1] > 0.99);

  const auto degenerate =
      arm_selection_probability(fresh, mood(0.0), kRationale, enc, 1, rng);
  CHECK((degenerate[0] == 1.0 || degenerate[1] == 1.0));
  CHECK(degenerate[0] + degenerate[1] == 1.0);

  CHECK_THROWS_AS(
      arm_selection_probability(fresh, mood(0.0), kRationale, enc, 0, rng),
      ValidationError);
}

TEST_CASE("TS selection frequency matches the probability estimate") {
  const auto enc = mood_encoding();
  auto state = state_with_mean({0.1, 0.05, -0.1, 0.2}, 0.4);
  Rng prob_rng(6);
  const int n = 100000;
  const auto probs =
      arm_selection_probability(state, mood(1.0), kRationale, enc, n, prob_rng);
  Rng select_rng(7);
  long ones = 0;
  for (int i = 0; i < n; ++i) {
    ones += select_arm_ts(state, mood(1.0), kRationale, enc, select_rng);
  }
  CHECK(std::fabs(static_cast<double>(ones) / n - probs[1]) < 0.01);
}

TEST_CASE("features shared by all arms never change the argmax") {
  const auto enc = mood_encoding();
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd mu(4);
    for (int i = 0; i < 4; ++i) mu[i] = rng.normal();
    const auto ctx = mood(static_cast<double>(trial % 2));
    const auto base = arm_scores(mu, ctx, kRationale, enc);
    Eigen::VectorXd shifted = mu;
    shifted[0] += rng.normal() * 10.0;                 // intercept
    shifted[2] += rng.normal() * 10.0;                 // context main effect
    const auto moved = arm_scores(shifted, ctx, kRationale, enc);
    const int argmax_base = base[1] > base[0] ? 1 : 0;
    const int argmax_moved = moved[1] > moved[0] ? 1 : 0;
    CHECK(argmax_base == argmax_moved);
  }
}
