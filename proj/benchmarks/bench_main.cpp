#include <benchmark/benchmark.h>

#include "cellres/cellres.hpp"

using namespace cellres;

namespace {

void BM_CellSolve(benchmark::State& state) {
  const auto coeff = catalogue_2d("case2");
  const auto grid = Grid2D::square(1.0, static_cast<int>(state.range(0)));
  int iterations = 0;
  for (auto _ : state) {
    const auto est = estimate_tensor(coeff, grid);
    iterations = est.iterations;
    benchmark::DoNotOptimize(est.tensor.a11);
  }
  state.counters["cg_iterations"] = iterations;
  state.SetComplexityN(static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_CellSolve)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond);

void BM_CellSolveUnpreconditioned(benchmark::State& state) {
  const auto coeff = catalogue_2d("case2");
  const auto grid = Grid2D::square(1.0, static_cast<int>(state.range(0)));
  SolverOptions options;
  options.preconditioner = Preconditioner::none;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tensor(coeff, grid, options).tensor.a11);
}
BENCHMARK(BM_CellSolveUnpreconditioned)->RangeMultiplier(2)->Range(32, 128)->Unit(benchmark::kMillisecond);

void BM_OperatorApply(benchmark::State& state) {
  const CellOperator op(Grid2D::square(1.0, static_cast<int>(state.range(0))), catalogue_2d("case2"));
  std::vector<double> u(op.grid().size(), 1.0), out(op.grid().size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = static_cast<double>(i % 17);
  for (auto _ : state) {
    op.apply(u.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.size()));
}
BENCHMARK(BM_OperatorApply)->RangeMultiplier(4)->Range(32, 512);

void BM_SmoothedAverage(benchmark::State& state) {
  const auto a1 = catalogue_1d("a1");
  const auto kernel = build_polynomial_kernel(1, 1);
  const double delta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_average(a1, delta, kernel));
}
BENCHMARK(BM_SmoothedAverage)->Arg(10)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SmoothedAverageTable(benchmark::State& state) {
  const auto a2 = catalogue_1d("a2");
  const auto kernel = flat_kernel();
  const double delta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_average(a2, delta, kernel));
}
BENCHMARK(BM_SmoothedAverageTable)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_KernelBuild(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_polynomial_kernel(p, 3));
}
BENCHMARK(BM_KernelBuild)->DenseRange(0, 8, 4);

}  // namespace

BENCHMARK_MAIN();
