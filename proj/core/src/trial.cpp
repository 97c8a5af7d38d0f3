#include "mabkit/trial.hpp"

#include <thread>

#include "mabkit/errors.hpp"

namespace mabkit {

std::string PolicySpec::label() const {
  switch (kind) {
    case Kind::ContextualTS:
      return "ContextualTS";
    case Kind::UniformRandom:
      return "UniformRandom";
    case Kind::Mixture:
      return "Mixture";
  }
  throw InternalError("unreachable policy kind");
}

PolicySpec PolicySpec::from_label(const std::string& s) {
  if (s == "ContextualTS" || s == "ts") return ts();
  if (s == "UniformRandom" || s == "uniform") return uniform();
  if (s == "Mixture" || s == "mixture") return mixture(0.5);
  throw ValidationError("unknown policy '" + s +
                        "' (expected ts, uniform or mixture)");
}

void TrialConfig::validate() const {
  if (horizon < 0) throw ValidationError("horizon must be >= 0");
  if (update_every < 1) throw ValidationError("update cadence must be >= 1");
  if (factor.levels < 1) {
    throw ValidationError("factor must have at least one level");
  }
  if (encoding.dimension() < 1) throw ValidationError("encoding is empty");
  if (policy.kind == PolicySpec::Kind::Mixture &&
      !(policy.mixture_p >= 0.0 && policy.mixture_p <= 1.0)) {
    throw ValidationError("mixture probability must lie in [0, 1]");
  }
  for (const auto& term : encoding.terms()) {
    if (!term.context_var.empty() && !context.has(term.context_var)) {
      throw ValidationError("encoding term '" + term.name +
                            "' references undeclared context variable '" +
                            term.context_var + "'");
    }
  }
  reward.validate(encoding);
  (void)algorithm_noise.scale_for(encoding.dimension());
}

AssignmentLog run_trial(const TrialConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const double v = config.algorithm_noise.scale_for(config.encoding.dimension());
  PosteriorState state(config.encoding.dimension(), v);

  AssignmentLog log;
  log.reserve(config.horizon);
  std::vector<std::pair<Eigen::VectorXd, double>> pending;

  for (long t = 1; t <= config.horizon; ++t) {
    AssignmentRecord rec;
    rec.t = t;
    rec.user = "u" + std::to_string(t);
    rec.decision_point = config.factor.name;
    rec.context = generate_context(config.context, rng);
    rec.timestamp = t;

    switch (config.policy.kind) {
      case PolicySpec::Kind::ContextualTS:
        rec.policy = PolicyTag::ContextualTS;
        break;
      case PolicySpec::Kind::UniformRandom:
        rec.policy = PolicyTag::UniformRandom;
        break;
      case PolicySpec::Kind::Mixture:
        rec.policy = select_policy(config.policy.mixture_p, rng);
        break;
    }
    rec.arm = rec.policy == PolicyTag::ContextualTS
                  ? select_arm_ts(state, rec.context, config.factor,
                                  config.encoding, rng)
                  : select_arm_uniform(config.factor, rng);

    const double raw =
        raw_reward(config.reward, config.encoding, rec.arm, rec.context, rng);
    const double observed = discretize_reward(raw, config.reward.grid);
    const bool missing = rng.bernoulli(config.reward.missing_prob);
    if (!missing) {
      rec.reward = observed;
      pending.emplace_back(config.encoding.encode(rec.arm, rec.context),
                           observed);
      if (static_cast<int>(pending.size()) >= config.update_every) {
        for (const auto& [b, r] : pending) state.update(b, r);
        pending.clear();
      }
    }
    log.push_back(std::move(rec));
  }
  return log;
}

ReplicationSet::ReplicationSet(TrialConfig config, int reps,
                               std::uint64_t master_seed)
    : config_(std::move(config)), reps_(reps), master_seed_(master_seed) {
  if (reps < 1) throw ValidationError("replication count must be >= 1");
  config_.validate();
}

std::uint64_t ReplicationSet::seed_for(int rep) const {
  if (rep < 0 || rep >= reps_) {
    throw ValidationError("replication index out of range");
  }
  return derive_stream_seed(master_seed_, static_cast<std::uint64_t>(rep));
}

AssignmentLog ReplicationSet::log(int rep) const {
  return run_trial(config_, seed_for(rep));
}

void ReplicationSet::for_each_log(
    const std::function<void(int, const AssignmentLog&)>& fn,
    int threads) const {
  if (threads < 1) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min(threads, reps_);
  if (threads == 1) {
    for (int rep = 0; rep < reps_; ++rep) fn(rep, log(rep));
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([this, &fn, w, threads] {
      for (int rep = w; rep < reps_; rep += threads) fn(rep, log(rep));
    });
  }
  for (auto& worker : workers) worker.join();
}

ReplicationSet run_replications(const TrialConfig& config, int reps,
                                std::uint64_t master_seed) {
  return ReplicationSet(config, reps, master_seed);
}

std::optional<double> average_reward(const AssignmentLog& log,
                                     const RecordPredicate& filter) {
  double sum = 0.0;
  long n = 0;
  for (const auto& rec : log) {
    if (!rec.reward) continue;
    if (filter && !filter(rec)) continue;
    sum += *rec.reward;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace mabkit
