// OpenMP kernels against their serial reference paths.

#include "timeless/pm_engine.hpp"
#include "timeless/temporal_order.hpp"

#include <benchmark/benchmark.h>

using namespace timeless;

namespace {

const WindowFunction kUnit = WindowFunction::indicator(0.0, 1.0);

InteractionSchedule kick() {
  COperator sx(2, 2);
  sx << 0, 1, 1, 0;
  InteractionSchedule schedule(2, {});
  schedule.add_term(kUnit, 0.0, 0.5 * sx);
  return schedule;
}

void BM_SecondOrder(benchmark::State& state) {
  const auto kernel = StepKernel::bandlimited(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(second_order_coefficients(kernel, kUnit, 0.0, 3.0, 10.0));
}

void BM_SecondOrderSerial(benchmark::State& state) {
  const auto kernel = StepKernel::bandlimited(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(second_order_coefficients_serial(kernel, kUnit, 0.0, 3.0, 10.0));
}

void BM_BornSeries(benchmark::State& state) {
  const double energy = static_cast<double>(state.range(0));
  const auto schedule = kick();
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.02 / energy);
  BornOptions options;
  options.node_spacing = 0.02 / energy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(born_series_solve(StepKernel::bandlimited(energy), schedule, basis_vector(2, 0), grid, options));
  }
}

void BM_BornSeriesReference(benchmark::State& state) {
  const double energy = static_cast<double>(state.range(0));
  const auto schedule = kick();
  const TimeGrid grid = trajectory_grid(schedule, energy, 0.02 / energy);
  BornOptions options;
  options.node_spacing = 0.02 / energy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        born_series_solve_reference(StepKernel::bandlimited(energy), schedule, basis_vector(2, 0), grid, options));
  }
}

void BM_SineIntegral(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sine_integral(x));
    x += 0.013;
    if (x > 60.0) x = 0.0;
  }
}

}  // namespace

BENCHMARK(BM_SecondOrder)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SecondOrderSerial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BornSeries)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BornSeriesReference)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SineIntegral);

BENCHMARK_MAIN();
