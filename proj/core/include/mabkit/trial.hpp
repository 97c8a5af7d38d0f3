#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mabkit/policy.hpp"
#include "mabkit/reward_model.hpp"

namespace mabkit {

/// Assignment policy for a trial: pure TS, pure uniform, or the deployed
/// per-observation mixture.
struct PolicySpec {
  enum class Kind { ContextualTS, UniformRandom, Mixture };

  Kind kind = Kind::UniformRandom;
  double mixture_p = 0.5;  // P(ContextualTS) when kind == Mixture

  static PolicySpec ts() { return {Kind::ContextualTS, 1.0}; }
  static PolicySpec uniform() { return {Kind::UniformRandom, 0.0}; }
  static PolicySpec mixture(double p) { return {Kind::Mixture, p}; }

  std::string label() const;
  static PolicySpec from_label(const std::string& s);
};

/// Everything needed to simulate one experiment.
struct TrialConfig {
  long horizon = 0;  // N participants
  Factor factor{"Rationale", 2, {"absent", "present"}};
  ContextSchema context;
  FeatureEncoding encoding;
  RewardModel reward;
  PolicySpec policy;
  NoiseParams algorithm_noise = NoiseParams::direct(1.0);
  int update_every = 1;  // posterior refresh cadence, in rewarded observations

  void validate() const;
};

/// One assignment event, simulated or imported.
struct AssignmentRecord {
  long t = 0;
  std::string user;
  std::string decision_point;
  PolicyTag policy = PolicyTag::UniformRandom;
  ContextVector context;
  int arm = 0;
  std::optional<double> reward;  // absent when the user never responded
  std::int64_t timestamp = 0;
};

using AssignmentLog = std::vector<AssignmentRecord>;

/// Simulate one experiment. Fully deterministic given the seed: contexts,
/// policy flips, arm draws, rewards and missingness all come from one
/// stream. The shared posterior updates with every observed reward
/// (whichever policy produced it), in batches of `update_every`.
AssignmentLog run_trial(const TrialConfig& config, std::uint64_t seed);

/// A set of independent replications of one trial configuration. Logs are
/// regenerated on demand from per-replication derived seeds, so the set is
/// cheap to hold and identical however it is scheduled.
class ReplicationSet {
 public:
  ReplicationSet(TrialConfig config, int reps, std::uint64_t master_seed);

  int size() const { return reps_; }
  std::uint64_t master_seed() const { return master_seed_; }
  const TrialConfig& config() const { return config_; }

  std::uint64_t seed_for(int rep) const;
  AssignmentLog log(int rep) const;

  /// Visit every replication log. With threads > 1 the callback runs
  /// concurrently and must be thread-safe; replication indices partition
  /// across workers, so results keyed by index are schedule-independent.
  void for_each_log(
      const std::function<void(int rep, const AssignmentLog&)>& fn,
      int threads = 1) const;

 private:
  TrialConfig config_;
  int reps_ = 0;
  std::uint64_t master_seed_ = 0;
};

ReplicationSet run_replications(const TrialConfig& config, int reps,
                                std::uint64_t master_seed);

using RecordPredicate = std::function<bool(const AssignmentRecord&)>;

/// Mean of observed rewards matching the filter; empty when no record
/// qualifies (never NaN).
std::optional<double> average_reward(const AssignmentLog& log,
                                     const RecordPredicate& filter = nullptr);

}  // namespace mabkit
