#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mabkit/scenario.hpp"
#include "mabkit/trial.hpp"

namespace mabkit {

/// One effect to test on collected data: a coordinate of the coefficient
/// vector against a null value.
struct EffectSpec {
  std::string name;
  int term_index = 0;
  double null_value = 0.0;
  double level = 0.95;  // central credible mass
  int draws = 10000;    // posterior draws for the empirical interval

  /// Resolve a named encoding term; throws if the encoding lacks it.
  static EffectSpec for_term(const FeatureEncoding& enc,
                             const std::string& term_name);
};

/// Outcome of one credible-interval test.
struct TestResult {
  std::string effect;
  double lo = 0.0;
  double hi = 0.0;
  double posterior_mean = 0.0;
  bool rejected = false;  // interval excludes the null value
};

/// Conjugate analysis posterior over all rewarded records of a log,
/// regardless of which policy generated them. Same model family and prior
/// as the algorithm (B starts at I_d, mean 0), with analysis scale v.
PosteriorState fit_analysis_posterior(const AssignmentLog& log,
                                      const FeatureEncoding& enc, double v);

/// Central credible interval for one effect from empirical quantiles of
/// posterior draws.
TestResult credible_interval(const PosteriorState& state,
                             const EffectSpec& effect, Rng& rng);

/// A rejection-rate estimate over replications.
struct RateEstimate {
  double rate = 0.0;
  double mc_stderr = 0.0;  // sqrt(rate (1 - rate) / reps)
  int reps = 0;
};

/// Fraction of replications whose test rejected. Analysis draws use a
/// stream derived from the set's master seed, so results are reproducible
/// and schedule-independent.
RateEstimate estimate_fpr(const ReplicationSet& set, const EffectSpec& effect,
                          double analysis_v, int threads = 1);

/// Per-effect rejection fractions over one replication set (the posterior
/// is fitted once per replication and tested against every effect).
std::vector<std::pair<EffectSpec, RateEstimate>> estimate_power(
    const ReplicationSet& set, const std::vector<EffectSpec>& effects,
    double analysis_v, int threads = 1);

/// Named record filter for reward breakdowns.
struct Subgroup {
  std::string name;
  RecordPredicate predicate;  // null = all records

  static Subgroup all();
  static Subgroup context_equals(const std::string& variable, double value);
};

/// Mean reward per policy tag and subgroup, averaged across replications
/// (each replication contributes its own mean; replications with no
/// qualifying record are skipped and counted in reps_used).
struct RewardReportRow {
  std::string policy;
  std::string subgroup;
  double mean_reward = 0.0;
  double mc_stderr = 0.0;  // across-replication standard error
  int reps_used = 0;
};

std::vector<RewardReportRow> reward_report(const ReplicationSet& set,
                                           const std::vector<Subgroup>& subgroups,
                                           int threads = 1);

/// One scenario evaluated over a grid of horizons and policies, producing
/// rejection-rate rows in the reference-table layout.
struct EvaluationRequest {
  ScenarioConfig scenario;
  std::vector<long> horizons{100, 1000};
  std::vector<PolicySpec> policies{PolicySpec::ts(), PolicySpec::uniform()};
  int reps = 1000;
  std::uint64_t seed = 1;
  double algorithm_scale = kEvaluationAlgorithmScale;  // CTS data collection
  std::optional<double> analysis_scale;  // default: scenario.analysis_scale
  std::optional<std::vector<std::string>> effects;  // default: scenario list
  int draws = 10000;  // posterior draws per credible interval
  int update_every = 1;
  int threads = 1;
};

struct EvaluationRow {
  int scenario_id = 0;
  std::string scenario;
  std::string policy;
  long horizon = 0;
  std::string effect;
  double rate = 0.0;
  double mc_stderr = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;  // master seed of this row's replication set
};

std::vector<EvaluationRow> run_evaluation(const EvaluationRequest& request);

}  // namespace mabkit
