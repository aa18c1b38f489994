#include <benchmark/benchmark.h>

#include <autoexplore/generators.hpp>
#include <autoexplore/linear_fa.hpp>
#include <autoexplore/mirror_descent.hpp>
#include <autoexplore/sampler.hpp>

using namespace autoexplore;

namespace {

void BM_SpmdStepTsallis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(n, 0.0, 5.0);
  const auto dgf = DistanceGenerator::tsallis(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spmd_step(pi, q, Regularizer::none(), 0.3, dgf));
  }
}
BENCHMARK(BM_SpmdStepTsallis)->Arg(2)->Arg(5)->Arg(32);

void BM_ExactValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mdp = gen_garnet(n, 4, 5, 1, 0.9);
  const auto pi = Policy::uniform(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_value(mdp, pi));
  }
}
BENCHMARK(BM_ExactValue)->Arg(20)->Arg(200);

void BM_SampleFHat(benchmark::State& state) {
  const auto mdp = gen_garnet(10, 3, 4, 2, 0.8);
  const auto fmap = FeatureMap::random_gaussian(30, 8, 3);
  const auto pi = Policy::uniform(10, 3);
  CtdConfig cfg;
  cfg.m = 50;
  cfg.f = 0.5;
  cfg.eps_state = 0.2;
  cfg.eps_action = 0.05;
  const Eigen::VectorXd theta = Eigen::VectorXd::Ones(8);
  SampleStream stream(mdp, 4, 0, std::numeric_limits<std::int64_t>::max());
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_F_hat(stream, pi, theta, fmap, cfg));
  }
  state.counters["samples_per_draw"] =
      benchmark::Counter(static_cast<double>(stream.samples()), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SampleFHat);

void BM_DynamicMixingCollect(benchmark::State& state) {
  const auto mdp = gen_garnet(10, 3, 4, 5, 0.9);
  const auto pi = Policy::uniform(10, 3);
  SampleStream stream(mdp, 6, 0, std::numeric_limits<std::int64_t>::max());
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamic_mixing_collect(stream, pi, 0.01, 0.05));
  }
  state.counters["samples_per_call"] =
      benchmark::Counter(static_cast<double>(stream.samples()), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_DynamicMixingCollect);

}  // namespace
BENCHMARK_MAIN();
