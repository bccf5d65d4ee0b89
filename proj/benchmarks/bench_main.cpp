#include <benchmark/benchmark.h>

#include "krein/harness.hpp"

namespace {

using namespace krein;

BlockOperator instance(Eigen::Index n, double margin) {
  InstanceSpec s;
  s.p = n;
  s.m = n;
  s.margin = margin;
  s.seed = 17;
  return random_dissipative(s);
}

void BM_RieszQuadrature(benchmark::State& state) {
  const CMatrix a = instance(state.range(0), 0.2).assemble();
  const Contour c = auto_contour(a);
  for (auto _ : state) benchmark::DoNotOptimize(riesz_projector_quadrature(a, c).q_plus);
}
BENCHMARK(BM_RieszQuadrature)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RieszExact(benchmark::State& state) {
  const CMatrix a = instance(state.range(0), 0.2).assemble();
  for (auto _ : state) benchmark::DoNotOptimize(riesz_projector_exact(a).q_plus);
}
BENCHMARK(BM_RieszExact)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SolveUniformlyDissipative(benchmark::State& state) {
  const BlockOperator a = instance(state.range(0), 0.5);
  const SolverConfig cfg = default_solver_config();
  for (auto _ : state) benchmark::DoNotOptimize(solve_uniformly_dissipative(a, cfg).k);
}
BENCHMARK(BM_SolveUniformlyDissipative)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SolveTheorem(benchmark::State& state) {
  const BlockOperator a = instance(state.range(0), state.range(1) / 10.0);
  const SolverConfig cfg = default_solver_config();
  for (auto _ : state) benchmark::DoNotOptimize(solve_theorem(a, cfg).k);
}
BENCHMARK(BM_SolveTheorem)->Args({5, 0})->Args({10, 0})->Args({10, 1})->Args({20, 1})->Unit(benchmark::kMillisecond);

void BM_RiccatiResidual(benchmark::State& state) {
  const BlockOperator a = instance(state.range(0), 0.5);
  const SolveReport r = solve_uniformly_dissipative(a, default_solver_config());
  const AngleOperator k(a.structure(), r.k);
  for (auto _ : state) benchmark::DoNotOptimize(riccati_residual(a, k, r.mu).residual);
}
BENCHMARK(BM_RiccatiResidual)->Arg(10)->Arg(20)->Arg(40);

void BM_EvaluateInstance(benchmark::State& state) {
  InstanceSpec s;
  s.p = state.range(0);
  s.m = state.range(0);
  s.margin = 0.1;
  s.seed = 3;
  const SolverConfig cfg = default_solver_config();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_instance(s, cfg).pass);
}
BENCHMARK(BM_EvaluateInstance)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
