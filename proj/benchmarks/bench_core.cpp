#include <vector>

#include <benchmark/benchmark.h>

#include "rbl/ambiguity.hpp"
#include "rbl/opt_oracle.hpp"
#include "rbl/robust_solvers.hpp"
#include "rbl/sum_law.hpp"

namespace {

const rbl::MeanMadSpec kSpec(1.0, 0.5);

void iid_two_point_sum(benchmark::State& state) {
  const auto dist = rbl::make_two_point(kSpec, 0.5);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rbl::iid_two_point_sum(dist, m));
}
BENCHMARK(iid_two_point_sum)->RangeMultiplier(10)->Range(100, 1000000);

void iid_tail_prob(benchmark::State& state) {
  const auto dist = rbl::make_two_point(kSpec, 0.9);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rbl::iid_tail_prob(dist, m, 0.7 * m));
}
BENCHMARK(iid_tail_prob)->RangeMultiplier(10)->Range(100, 1000000);

void opt_deterministic(benchmark::State& state) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.6)};
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rbl::opt_deterministic(dists, m).revenue);
}
BENCHMARK(opt_deterministic)->DenseRange(1, 3);

void worst_case_alpha(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  rbl::SolverOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rbl::worst_case_alpha(kSpec, m, 0.7 * m, options).value);
}
BENCHMARK(worst_case_alpha)->RangeMultiplier(100)->Range(100, 10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
