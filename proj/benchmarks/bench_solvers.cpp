#include <benchmark/benchmark.h>

#include "bdsde/explicit_solver.hpp"
#include "bdsde/montecarlo.hpp"
#include "bdsde/picard.hpp"
#include "bdsde/tree_solver.hpp"

namespace {

using namespace bdsde;

void BM_SolveImplicitSine(benchmark::State& state) {
  const auto spec = builtin("sine");
  const TimeGrid g(1.0, static_cast<int>(state.range(0)));
  const auto eps = sample_path(g, 1).eps;
  for (auto _ : state) benchmark::DoNotOptimize(solve_backward(spec, g, eps).y0);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveImplicitSine)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_SolveExplicitSine(benchmark::State& state) {
  const auto spec = builtin("sine");
  const TimeGrid g(1.0, static_cast<int>(state.range(0)));
  const auto eps = sample_path(g, 1).eps;
  for (auto _ : state) benchmark::DoNotOptimize(solve_backward_explicit(spec, g, eps).y0);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveExplicitSine)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_SolveKeepTree(benchmark::State& state) {
  const auto spec = builtin("linear");
  const TimeGrid g(1.0, static_cast<int>(state.range(0)));
  const auto eps = sample_path(g, 1).eps;
  SolveOptions o;
  o.keep_tree = true;
  for (auto _ : state) benchmark::DoNotOptimize(solve_backward(spec, g, eps, o).y0);
}
BENCHMARK(BM_SolveKeepTree)->Arg(64)->Arg(256);

void BM_PicardSolve(benchmark::State& state) {
  const auto spec = builtin("sine");
  const TimeGrid g(1.0, static_cast<int>(state.range(0)));
  const auto eps = sample_path(g, 1).eps;
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(spec, g, eps).iterate.p);
}
BENCHMARK(BM_PicardSolve)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_WeightedNorm(benchmark::State& state) {
  const auto spec = builtin("sine");
  const int n = static_cast<int>(state.range(0));
  const TimeGrid g(1.0, n);
  const auto eps = sample_path(g, 1).eps;
  SolveOptions o;
  o.keep_tree = true;
  const auto tree = solve_backward(spec, g, eps, o).levels;
  const auto first = picard_step(zero_iterate(g), spec, g, eps).levels;
  const auto diff = tree_difference(tree, first);
  NormOptions no;
  no.method = static_cast<NormMethod>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(weighted_norm(diff, 2.0, g, no));
}
BENCHMARK(BM_WeightedNorm)
    ->Args({12, static_cast<int>(NormMethod::enumeration)})
    ->Args({12, static_cast<int>(NormMethod::level_sets)})
    ->Args({128, static_cast<int>(NormMethod::level_sets)})
    ->Args({128, static_cast<int>(NormMethod::monte_carlo)})
    ->Unit(benchmark::kMillisecond);

void BM_EstimateSine(benchmark::State& state) {
  const auto spec = builtin("sine");
  const TimeGrid g(1.0, 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate(spec, g, static_cast<std::size_t>(state.range(0)), 7).mean_y0);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateSine)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
