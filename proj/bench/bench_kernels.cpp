#include <benchmark/benchmark.h>

#include <vector>

#include "amoc/core_stats.hpp"
#include "amoc/mc_harness.hpp"
#include "amoc/rng.hpp"
#include "reference.hpp"

namespace {

std::vector<double> data(std::size_t n) {
    amoc::Philox4x32 rng(1, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

void BM_ScanTkn(benchmark::State& state) {
    const auto x = data(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const amoc::PrefixSums ps(x);
        benchmark::DoNotOptimize(amoc::scan_tkn(ps, amoc::Sides::two).max_value);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScanTkn)->RangeMultiplier(4)->Range(64, 1 << 20)->Complexity(benchmark::oN);

void BM_ScanTknReference(benchmark::State& state) {
    const auto x = data(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(amoc::reference::t_scan(x).back());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScanTknReference)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_WeightedSupnorm(benchmark::State& state) {
    const auto x = data(static_cast<std::size_t>(state.range(0)));
    const amoc::PrefixSums ps(x);
    for (auto _ : state) {
        benchmark::DoNotOptimize(amoc::weighted_supnorm(ps));
    }
}
BENCHMARK(BM_WeightedSupnorm)->RangeMultiplier(16)->Range(64, 1 << 20);

// Same experiment on 1 worker and on the OpenMP default.
void BM_RunNull(benchmark::State& state) {
    amoc::ExperimentConfig c;
    c.n = 10000;
    c.reps = 200;
    c.base_seed = 3;
    c.threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(amoc::run_null(c).raw_max.back());
    }
}
BENCHMARK(BM_RunNull)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
