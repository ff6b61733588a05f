// Serial reference vs OpenMP kernel for each parallel sweep.
// Argument 0 runs the serial path, 1 the parallel one.
#include "dirac/martin.hpp"
#include "dirac/propagation.hpp"
#include "dirac/series.hpp"
#include "dirac/spectral.hpp"
#include "dirac/weyl.hpp"

#include <benchmark/benchmark.h>

using namespace dirac;

namespace {

Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

std::vector<cplx> z_grid(int n)
{
    std::vector<cplx> zs;
    for (int k = 0; k < n; ++k) zs.emplace_back(-3.0 + 6.0 * k / (n - 1), 0.5 + (k % 4) * 0.5);
    return zs;
}

void growth(benchmark::State& state)
{
    const auto phi = OperatorData::constant(1.0);
    const auto zs = z_grid(16);
    for (auto _ : state) benchmark::DoNotOptimize(growth_field(phi, zs, {25.0, 50.0}, exec_of(state)));
}

void cells(benchmark::State& state)
{
    const auto phi = OperatorData::chirp(2.0);
    for (auto _ : state) benchmark::DoNotOptimize(cell_averages(phi, 0.0, 0.01, 20000, exec_of(state)));
}

void schur(benchmark::State& state)
{
    const auto phi = OperatorData::gated_chirp(2.0, 2.0);
    const auto zs = z_grid(16);
    for (auto _ : state) benchmark::DoNotOptimize(schur_table(phi, zs, exec_of(state)));
}

void martin(benchmark::State& state)
{
    const auto model = martin_build(GapSet::from({{-2.0, -1.0}, {0.5, 1.5}}));
    const auto zs = z_grid(64);
    for (auto _ : state) benchmark::DoNotOptimize(martin_table(model, zs, exec_of(state)));
}

void residuals(benchmark::State& state)
{
    const auto phi = OperatorData::chirp(2.0);
    const std::vector<cplx> zs{{0.0, 8.0}, {0.0, 16.0}, {0.0, 32.0}, {0.0, 64.0}};
    for (auto _ : state) benchmark::DoNotOptimize(growth_residual_table(phi, 0.0, 50.0, zs, exec_of(state)));
}

void averages(benchmark::State& state)
{
    RegularityOptions opts;
    opts.exec = exec_of(state);
    opts.frequency = false;
    const auto phi = OperatorData::gated_chirp(2.0, 2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(regularity_gap(phi, 0.0, {300.0, 1000.0, 3000.0}, {1.0, 0.5, 0.25}, opts));
}

void zeros(benchmark::State& state)
{
    ZeroCountOptions opts;
    opts.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(zero_counting(OperatorData::constant(1.0), 40.0, -3.0, 3.0, 8, opts));
}

} // namespace

BENCHMARK(growth)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(cells)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(schur)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(martin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(residuals)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(averages)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(zeros)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
