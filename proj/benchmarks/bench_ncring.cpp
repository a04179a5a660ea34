#include "ncring/analysis.hpp"
#include "ncring/experiment.hpp"
#include "ncring/ring.hpp"
#include "ncring/spline.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

ncring::RingConfig reference_ring(long long n)
{
    ncring::RingConfig ring;
    ring.n_electrons = n;
    ring.nc.theta_tilde = 1.76e-61;
    return ring;
}

void BM_GroundEnergyBruteforce(benchmark::State& state)
{
    const auto ring = reference_ring(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(ncring::ground_energy_bruteforce(ring, 0.2));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GroundEnergyBruteforce)->RangeMultiplier(10)->Range(10, 100000)->Complexity(benchmark::oNLogN);

void BM_PersistentCurrentSweep(benchmark::State& state)
{
    const auto ring = reference_ring(100001);
    const auto grid = ncring::make_grid(0.01, 0.5, 256, ncring::GridSpacing::log);
    for (auto _ : state)
        for (double f : grid)
            benchmark::DoNotOptimize(ncring::persistent_current(ring, f));
}
BENCHMARK(BM_PersistentCurrentSweep);

void BM_SmoothingSplineGcv(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto series = ncring::generate_dataset(reference_ring(100001), 0.01, 0.5, n, ncring::GridSpacing::log,
                                                 {0.01, 0.0, 1});
    std::vector<double> f;
    std::vector<double> j;
    for (const auto& p : series.points) {
        f.push_back(p.f);
        j.push_back(p.current);
    }
    const std::vector<double> w(n, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ncring::smoothing_spline(f, j, w));
}
BENCHMARK(BM_SmoothingSplineGcv)->Arg(64)->Arg(256)->Arg(1024);

void BM_DetectNoisy(benchmark::State& state)
{
    const auto series = ncring::generate_dataset(reference_ring(100001), 0.01, 0.5, 256, ncring::GridSpacing::log,
                                                 {0.01, 0.0, 3});
    for (auto _ : state)
        benchmark::DoNotOptimize(ncring::detect(series, {}));
}
BENCHMARK(BM_DetectNoisy)->Unit(benchmark::kMillisecond);

void BM_DetectExactUnknownN(benchmark::State& state)
{
    auto series = ncring::generate_dataset(reference_ring(100000), 0.01, 0.5, 256, ncring::GridSpacing::log, {});
    series.meta.n_electrons.reset();
    for (auto _ : state)
        benchmark::DoNotOptimize(ncring::detect(series, {}));
}
BENCHMARK(BM_DetectExactUnknownN)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
