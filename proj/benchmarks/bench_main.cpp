#include <benchmark/benchmark.h>

#include <random>

#include "fraclab/constants.hpp"
#include "fraclab/solver.hpp"

namespace {

using namespace fraclab;

Field random_field(const GridSpec& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(grid.size());
  for (auto& x : v) x = normal(rng);
  return Field(grid, std::move(v));
}

void BM_Assemble(benchmark::State& state) {
  const auto grid = GridSpec::interval(-1.0, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(grid, 0.8));
}
BENCHMARK(BM_Assemble)->Arg(128)->Arg(256)->Arg(512);

void BM_DenseApply(benchmark::State& state) {
  const auto grid = GridSpec::interval(-1.0, 1.0, static_cast<int>(state.range(0)));
  const auto op = assemble_operator(grid, 0.8);
  const auto u = random_field(grid, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
}
BENCHMARK(BM_DenseApply)->Arg(256)->Arg(1024)->Arg(4096);

void BM_ToeplitzApply(benchmark::State& state) {
  const auto grid = GridSpec::interval(-1.0, 1.0, static_cast<int>(state.range(0)));
  const auto op = assemble_operator(grid, 0.8);
  const auto fast = ToeplitzApplier::for_operator(op);
  const auto u = random_field(grid, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fast.apply(u.values()));
}
BENCHMARK(BM_ToeplitzApply)->Arg(256)->Arg(1024)->Arg(4096);

void BM_ConstantsReport(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(constants::make_report({3, 0.75, 2.5}));
}
BENCHMARK(BM_ConstantsReport);

void BM_SolveGroundState(benchmark::State& state) {
  const auto grid = GridSpec::interval(-1.0, 1.0, static_cast<int>(state.range(0)));
  const EnergyContext ctx(assemble_operator(grid, 0.8), Potential::constant(1.0), Nonlinearity::power(4.0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(ctx, SolverConfig{}));
}
BENCHMARK(BM_SolveGroundState)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
