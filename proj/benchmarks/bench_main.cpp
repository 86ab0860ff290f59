#include "convhom/cell_discretization.hpp"
#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "convhom/rate_certification.hpp"
#include "convhom/stationary_state.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace convhom;

namespace {

const Problem& problem_1d(int n) {
  static std::map<int, std::unique_ptr<Problem>> cache;
  auto& p = cache[n];
  if (!p) {
    Fixture f = make_fixture("skew_separable_1d");
    f.options.n = n;
    p = std::make_unique<Problem>(f.kernel, f.mu, f.options);
  }
  return *p;
}

void BM_FibreAssembly(benchmark::State& state) {
  const Problem& pb = problem_1d(static_cast<int>(state.range(0)));
  Coord xi = Coord::Constant(1, 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(pb.assembler().fibre(xi).A.data());
}
BENCHMARK(BM_FibreAssembly)->Arg(64)->Arg(128)->Arg(256);

void BM_OperatorNorm(benchmark::State& state) {
  const Problem& pb = problem_1d(static_cast<int>(state.range(0)));
  const CMatrix A = pb.assembler().fibre(Coord::Constant(1, 0.37)).A;
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(A));
}
BENCHMARK(BM_OperatorNorm)->Arg(64)->Arg(128)->Arg(256);

void BM_Stationary(benchmark::State& state) {
  const Problem& pb = problem_1d(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_stationary(pb.assembler()).q0.data());
}
BENCHMARK(BM_Stationary)->Arg(64)->Arg(128);

void BM_FibreError(benchmark::State& state) {
  const Problem& pb = problem_1d(128);
  const FibreMatrix fm = pb.assembler().fibre(Coord::Constant(1, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(fibre_error(pb, fm, 0.03125));
}
BENCHMARK(BM_FibreError);

void BM_Sweep(benchmark::State& state) {
  const Problem& pb = problem_1d(64);
  SweepConfig cfg;
  cfg.xi_per_axis = 16;
  cfg.patch_points = 4;
  for (auto _ : state) benchmark::DoNotOptimize(sup_sweep(pb, cfg, 0.05).C_hat);
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
