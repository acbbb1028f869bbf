#include <benchmark/benchmark.h>

#include <random>

#include "pottslab/boundary_opt.hpp"
#include "pottslab/exact_oracle.hpp"
#include "pottslab/recursion.hpp"

using namespace pottslab;

namespace {

std::vector<int> random_colors(int q, std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(1, q);
  std::vector<int> out(n);
  for (auto& c : out) c = pick(rng);
  return out;
}

// Brute-force weights on T^3_3: 3^13 interior configurations.
void BM_ExactEnumeration(benchmark::State& state) {
  const auto params = new_params(3, 3, 0.3);
  const auto xi = BoundarySpec::explicit_colors(random_colors(3, 27));
  const OracleOptions opt{.workers = static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(root_weights_exact(params, 3, xi, opt));
}
BENCHMARK(BM_ExactEnumeration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RecursiveSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto params = new_params(3, 3, 0.3);
  const auto xi = BoundarySpec::explicit_colors(random_colors(3, leaf_count(3, n)));
  const RecursionOptions opt{.workers = 1};
  for (auto _ : state) benchmark::DoNotOptimize(root_marginals_recursive(params, n, xi, opt));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(leaf_count(3, n)));
}
BENCHMARK(BM_RecursiveSweep)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_PureIteration(benchmark::State& state) {
  const auto params = critical_params(3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pure_deviation_sequence(params, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PureIteration)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_AdmissibleMax(benchmark::State& state) {
  const auto params = new_params(4, 4, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(h_max_admissible(params, 1.001, 1));
}
BENCHMARK(BM_AdmissibleMax)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
