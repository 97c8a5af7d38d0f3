#include "mabkit/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mabkit/errors.hpp"
#include "mabkit/log_io.hpp"

namespace mabkit {

namespace {

// Distinct stream family for analysis draws, so they never collide with the
// trial streams derived from the same master seed.
constexpr std::uint64_t kAnalysisStreamSalt = 0x616e616c797a6572ULL;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double position = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(position);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = position - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

EffectSpec EffectSpec::for_term(const FeatureEncoding& enc,
                                const std::string& term_name) {
  auto idx = enc.term_index(term_name);
  if (!idx) {
    throw ValidationError("effect '" + term_name +
                          "' is not a term of the encoding");
  }
  EffectSpec spec;
  spec.name = term_name;
  spec.term_index = *idx;
  return spec;
}

PosteriorState fit_analysis_posterior(const AssignmentLog& log,
                                      const FeatureEncoding& enc, double v) {
  PosteriorState state(enc.dimension(), v);
  for (const auto& rec : log) {
    if (!rec.reward) continue;
    state.update(enc.encode(rec.arm, rec.context), *rec.reward);
  }
  if (state.n_obs() == 0) {
    throw ValidationError("log has no rewarded records to fit");
  }
  return state;
}

TestResult credible_interval(const PosteriorState& state,
                             const EffectSpec& effect, Rng& rng) {
  if (effect.term_index < 0 || effect.term_index >= state.dimension()) {
    throw ValidationError("effect '" + effect.name +
                          "' indexes outside the posterior dimension");
  }
  if (effect.draws < 1) throw ValidationError("draw count must be >= 1");
  if (!(effect.level > 0.0 && effect.level < 1.0)) {
    throw ValidationError("credibility level must lie in (0, 1)");
  }
  std::vector<double> draws(effect.draws);
  for (int i = 0; i < effect.draws; ++i) {
    draws[i] = state.sample(rng)[effect.term_index];
  }
  std::sort(draws.begin(), draws.end());
  const double tail = (1.0 - effect.level) / 2.0;
  TestResult result;
  result.effect = effect.name;
  result.lo = quantile_sorted(draws, tail);
  result.hi = quantile_sorted(draws, 1.0 - tail);
  result.posterior_mean = state.mean()[effect.term_index];
  result.rejected =
      result.lo > effect.null_value || result.hi < effect.null_value;
  return result;
}

namespace {

RateEstimate rate_from_flags(const std::vector<char>& rejected) {
  RateEstimate est;
  est.reps = static_cast<int>(rejected.size());
  long hits = std::count(rejected.begin(), rejected.end(), 1);
  est.rate = static_cast<double>(hits) / est.reps;
  est.mc_stderr = std::sqrt(est.rate * (1.0 - est.rate) / est.reps);
  return est;
}

}  // namespace

RateEstimate estimate_fpr(const ReplicationSet& set, const EffectSpec& effect,
                          double analysis_v, int threads) {
  auto rates = estimate_power(set, {effect}, analysis_v, threads);
  return rates.front().second;
}

std::vector<std::pair<EffectSpec, RateEstimate>> estimate_power(
    const ReplicationSet& set, const std::vector<EffectSpec>& effects,
    double analysis_v, int threads) {
  if (effects.empty()) throw ValidationError("no effects to test");
  const auto& enc = set.config().encoding;
  std::vector<std::vector<char>> rejected(
      effects.size(), std::vector<char>(set.size(), 0));
  set.for_each_log(
      [&](int rep, const AssignmentLog& log) {
        PosteriorState posterior = fit_analysis_posterior(log, enc, analysis_v);
        Rng rng = Rng::derive(set.master_seed() ^ kAnalysisStreamSalt,
                              static_cast<std::uint64_t>(rep));
        for (std::size_t e = 0; e < effects.size(); ++e) {
          rejected[e][rep] = credible_interval(posterior, effects[e], rng).rejected;
        }
      },
      threads);
  std::vector<std::pair<EffectSpec, RateEstimate>> out;
  out.reserve(effects.size());
  for (std::size_t e = 0; e < effects.size(); ++e) {
    out.emplace_back(effects[e], rate_from_flags(rejected[e]));
  }
  return out;
}

Subgroup Subgroup::all() { return {"overall", nullptr}; }

Subgroup Subgroup::context_equals(const std::string& variable, double value) {
  return {variable + "=" + format_double(value),
          [variable, value](const AssignmentRecord& rec) {
            auto v = rec.context.find(variable);
            return v && *v == value;
          }};
}

std::vector<RewardReportRow> reward_report(const ReplicationSet& set,
                                           const std::vector<Subgroup>& subgroups,
                                           int threads) {
  std::vector<Subgroup> groups = subgroups;
  groups.push_back(Subgroup::all());

  const std::array<PolicyTag, 2> tags{PolicyTag::ContextualTS,
                                      PolicyTag::UniformRandom};
  // per (tag, group): per-rep means, indexed by rep; -infinity marks "empty"
  std::vector<std::vector<double>> means(
      tags.size() * groups.size(),
      std::vector<double>(set.size(), std::nan("")));
  set.for_each_log(
      [&](int rep, const AssignmentLog& log) {
        for (std::size_t ti = 0; ti < tags.size(); ++ti) {
          for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            const PolicyTag tag = tags[ti];
            const auto& pred = groups[gi].predicate;
            auto mean = average_reward(log, [&](const AssignmentRecord& rec) {
              return rec.policy == tag && (!pred || pred(rec));
            });
            if (mean) means[ti * groups.size() + gi][rep] = *mean;
          }
        }
      },
      threads);

  std::vector<RewardReportRow> rows;
  for (std::size_t ti = 0; ti < tags.size(); ++ti) {
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const auto& cell = means[ti * groups.size() + gi];
      double sum = 0.0, sum_sq = 0.0;
      int used = 0;
      for (double m : cell) {
        if (std::isnan(m)) continue;
        sum += m;
        sum_sq += m * m;
        ++used;
      }
      if (used == 0) continue;  // policy absent from these logs
      RewardReportRow row;
      row.policy = to_string(tags[ti]);
      row.subgroup = groups[gi].name;
      row.mean_reward = sum / used;
      if (used > 1) {
        const double var =
            (sum_sq - sum * sum / used) / static_cast<double>(used - 1);
        row.mc_stderr = std::sqrt(std::max(var, 0.0) / used);
      }
      row.reps_used = used;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<EvaluationRow> run_evaluation(const EvaluationRequest& request) {
  if (request.reps < 1) throw ValidationError("reps must be >= 1");
  if (request.draws < 1000) {
    throw ValidationError("reported rate tables need >= 1000 posterior draws");
  }
  const auto& sc = request.scenario;
  const double analysis_v =
      request.analysis_scale.value_or(sc.analysis_scale);
  const std::vector<std::string> effect_names =
      request.effects.value_or(sc.effect_names);
  std::vector<EffectSpec> effects;
  effects.reserve(effect_names.size());
  for (const auto& name : effect_names) {
    auto effect = EffectSpec::for_term(sc.trial.encoding, name);
    effect.draws = request.draws;
    effects.push_back(std::move(effect));
  }

  std::vector<EvaluationRow> rows;
  std::uint64_t combo = 0;
  for (const auto& policy : request.policies) {
    for (long horizon : request.horizons) {
      TrialConfig trial = sc.trial;
      trial.horizon = horizon;
      trial.policy = policy;
      trial.algorithm_noise = NoiseParams::direct(request.algorithm_scale);
      trial.update_every = request.update_every;
      const std::uint64_t set_seed = derive_stream_seed(request.seed, combo++);
      ReplicationSet set(trial, request.reps, set_seed);
      auto rates = estimate_power(set, effects, analysis_v, request.threads);
      for (const auto& [effect, rate] : rates) {
        EvaluationRow row;
        row.scenario_id = sc.id;
        row.scenario = sc.name;
        row.policy = policy.label();
        row.horizon = horizon;
        row.effect = effect.name;
        row.rate = rate.rate;
        row.mc_stderr = rate.mc_stderr;
        row.reps = rate.reps;
        row.seed = set_seed;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace mabkit
