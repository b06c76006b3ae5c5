#include <benchmark/benchmark.h>

#include "engulf/bregman.hpp"
#include "engulf/engulfing.hpp"
#include "engulf/expr.hpp"
#include "engulf/sections.hpp"

namespace {

using namespace engulf;

void BM_BregmanGap(benchmark::State& state) {
  const FunctionSpec f = catalog_function("quartic");
  const SubgradientPair base{{1.5}, {4 * 1.5 * 1.5 * 1.5}};
  const Vec y{-2.0};
  for (auto _ : state) benchmark::DoNotOptimize(bregman_gap(f, base, y));
}
BENCHMARK(BM_BregmanGap);

void BM_SymmetryRatio(benchmark::State& state) {
  const FunctionSpec f = catalog_function("quartic");
  const Vec x{1.0}, y{-3.7};
  for (auto _ : state) benchmark::DoNotOptimize(symmetry_ratio(f, x, y));
}
BENCHMARK(BM_SymmetryRatio);

void BM_SectionSolve1D(benchmark::State& state) {
  const FunctionSpec f = catalog_function("ex21");
  for (auto _ : state) benchmark::DoNotOptimize(solve_interval_1d(f, 0.5, 0.5, 2.0));
}
BENCHMARK(BM_SectionSolve1D);

void BM_BoundaryRadius2D(benchmark::State& state) {
  const FunctionSpec f = catalog_function("strip2d");
  const SubgradientPair base{{0.0, 0.0}, {0.0, 0.0}};
  const Vec dir{0.7071067811865476, 0.7071067811865476};
  for (auto _ : state) benchmark::DoNotOptimize(boundary_radius(f, base, 1.0, dir));
}
BENCHMARK(BM_BoundaryRadius2D);

void BM_EstimateKQuad(benchmark::State& state) {
  const FunctionSpec f = catalog_function("quad");
  SamplerConfig cfg;
  RefineConfig rc;
  rc.grid_per_axis = static_cast<int>(state.range(0));
  rc.box_doublings = 1;
  rc.refine_rounds = 10;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_k_char(f, cfg, rc));
}
BENCHMARK(BM_EstimateKQuad)->Arg(16)->Arg(48);

void BM_ParseEval(benchmark::State& state) {
  const auto tree = expr::parse("piecewise(x<0: x^2, x>=0: x^4)", 1);
  const FunctionSpec f = expr::make_function(tree);
  const Vec x{1.25};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f, x));
}
BENCHMARK(BM_ParseEval);

void BM_CheckSoftQuad(benchmark::State& state) {
  const FunctionSpec f = catalog_function("quad");
  SamplerConfig cfg;
  cfg.triples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_soft(f, 1.001, cfg));
}
BENCHMARK(BM_CheckSoftQuad)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
