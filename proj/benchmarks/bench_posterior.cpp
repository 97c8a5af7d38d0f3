#include <benchmark/benchmark.h>

#include "mabkit/posterior.hpp"

using namespace mabkit;

static void BM_PosteriorUpdate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.normal();
  PosteriorState posterior(d, 1.0);
  for (auto _ : state) {
    posterior.update(b, 0.75);
    benchmark::DoNotOptimize(posterior.mean().data());
  }
}
BENCHMARK(BM_PosteriorUpdate)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_PosteriorSample(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(2);
  PosteriorState posterior(d, 1.0);
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.normal();
  for (int n = 0; n < 100; ++n) posterior.update(b, rng.uniform01());
  for (auto _ : state) {
    auto draw = posterior.sample(rng);
    benchmark::DoNotOptimize(draw.data());
  }
}
BENCHMARK(BM_PosteriorSample)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
