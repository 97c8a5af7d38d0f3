#include <benchmark/benchmark.h>

#include "mabkit/analysis.hpp"

using namespace mabkit;

namespace {

TrialConfig scenario_trial(int id, long horizon, PolicySpec policy) {
  TrialConfig config = scenario_config(id).trial;
  config.horizon = horizon;
  config.policy = policy;
  config.algorithm_noise = NoiseParams::direct(kEvaluationAlgorithmScale);
  return config;
}

}  // namespace

static void BM_TrialUniform(benchmark::State& state) {
  const auto config = scenario_trial(3, state.range(0), PolicySpec::uniform());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto log = run_trial(config, ++seed);
    benchmark::DoNotOptimize(log.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrialUniform)->Arg(100)->Arg(1000);

static void BM_TrialContextualTS(benchmark::State& state) {
  const auto config = scenario_trial(3, state.range(0), PolicySpec::ts());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto log = run_trial(config, ++seed);
    benchmark::DoNotOptimize(log.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrialContextualTS)->Arg(100)->Arg(1000);

static void BM_AnalysisFit(benchmark::State& state) {
  const auto config = scenario_trial(3, state.range(0), PolicySpec::uniform());
  const auto log = run_trial(config, 7);
  for (auto _ : state) {
    auto posterior =
        fit_analysis_posterior(log, config.encoding, kScenario3AnalysisScale);
    benchmark::DoNotOptimize(posterior.mean().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalysisFit)->Arg(100)->Arg(1000);

static void BM_CredibleInterval(benchmark::State& state) {
  const auto config = scenario_trial(3, 1000, PolicySpec::uniform());
  const auto log = run_trial(config, 7);
  const auto posterior =
      fit_analysis_posterior(log, config.encoding, kScenario3AnalysisScale);
  auto effect = EffectSpec::for_term(config.encoding, "Rationale*Mood");
  effect.draws = static_cast<int>(state.range(0));
  Rng rng(3);
  for (auto _ : state) {
    auto result = credible_interval(posterior, effect, rng);
    benchmark::DoNotOptimize(&result);
  }
}
BENCHMARK(BM_CredibleInterval)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
