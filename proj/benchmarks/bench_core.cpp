#include <benchmark/benchmark.h>

#include "euii/dist.hpp"
#include "euii/gsd.hpp"
#include "euii/simulator.hpp"

using namespace euii;

static void BM_GsdRecursion(benchmark::State& state)
{
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto spec = gsd::make_spec(gsd::BoundaryFamily::obrien_fleming, k, 0.025, Sidedness::one, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsd::crossing_probabilities(spec, 2.5));
    }
}
BENCHMARK(BM_GsdRecursion)->Arg(2)->Arg(4)->Arg(7);

static void BM_PocockLevels(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(gsd::nominal_levels(gsd::BoundaryFamily::pocock, 4, 0.025, Sidedness::one));
    }
}
BENCHMARK(BM_PocockLevels);

static void BM_NoncentralT(benchmark::State& state)
{
    const double df = static_cast<double>(state.range(0));
    const double ncp = 0.5 * std::sqrt(df + 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dist::noncentral_t_cdf(ncp - 1.0, df, ncp));
    }
}
BENCHMARK(BM_NoncentralT)->Arg(7)->Arg(62)->Arg(1023)->Arg(8191);

static void BM_LogNoncentralTDeepTail(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(dist::log_noncentral_t_cdf(1.645, 8191.0, 0.5 * std::sqrt(8192.0)));
    }
}
BENCHMARK(BM_LogNoncentralTDeepTail);

static void BM_SimulatorThroughput(benchmark::State& state)
{
    sim::StudyGrid grid;
    grid.n_max_per_group = {32};
    grid.deltas = {0.0, 0.5};
    grid.designs = sim::default_designs();
    grid.priors = {0.5};
    sim::RunOptions opts;
    opts.nsim = 2000;
    opts.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::run_study(grid, opts));
    }
    state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(opts.nsim));
}
BENCHMARK(BM_SimulatorThroughput)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
