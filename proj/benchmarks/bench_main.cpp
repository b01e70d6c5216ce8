#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "cvxrich/confidence.hpp"
#include "cvxrich/convex_projection.hpp"
#include "cvxrich/estimators.hpp"
#include "cvxrich/frequency_table.hpp"
#include "cvxrich/sampling.hpp"
#include "cvxrich/study.hpp"

using namespace cvxrich;

namespace {

FrequencyTable fixture(const char* name) {
  return read_frequency_file(std::filesystem::path(CVXRICH_DATA_DIR) / name);
}

void BM_ConvexLse(benchmark::State& state, const char* name) {
  const auto f = empirical_freq(fixture(name));
  for (auto _ : state) benchmark::DoNotOptimize(convex_lse(f));
}
BENCHMARK_CAPTURE(BM_ConvexLse, bird, "bird.freq");
BENCHMARK_CAPTURE(BM_ConvexLse, butterfly, "butterfly.freq");
BENCHMARK_CAPTURE(BM_ConvexLse, tomato, "tomato.freq");

void BM_ConvexLseSimulated(benchmark::State& state) {
  const auto truth = make_truth(TruthKind::gamma_poisson_threshold, 1.1);
  const auto table = simulate_counts(truth, state.range(0), {1, 0});
  const auto f = empirical_freq(table);
  for (auto _ : state) benchmark::DoNotOptimize(convex_lse(f));
}
BENCHMARK(BM_ConvexLseSimulated)->Arg(100)->Arg(800)->Arg(5000);

void BM_ProjectRestricted(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const RestrictedCone cone(k, {1, k});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> t(k);
  for (auto& x : t) x = z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_restricted(t, cone));
}
BENCHMARK(BM_ProjectRestricted)->Arg(3)->Arg(5)->Arg(10)->Arg(23);

void BM_CiPlugin(benchmark::State& state, const char* name) {
  const auto e = estimate_convex(fixture(name));
  for (auto _ : state) benchmark::DoNotOptimize(ci_plugin(e, 0.05, 100, {1, 0}));
}
BENCHMARK_CAPTURE(BM_CiPlugin, butterfly_k2, "butterfly.freq");
BENCHMARK_CAPTURE(BM_CiPlugin, bird, "bird.freq");

void BM_CiBootstrap(benchmark::State& state) {
  const auto e = estimate_convex(fixture("butterfly.freq"));
  for (auto _ : state) benchmark::DoNotOptimize(ci_bootstrap(e, 0.05, 50, {1, 0}));
}
BENCHMARK(BM_CiBootstrap);

}  // namespace
BENCHMARK_MAIN();
