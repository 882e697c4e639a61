// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "maxbv/density_tv.hpp"
#include "maxbv/mc.hpp"
#include "maxbv/sampling.hpp"

namespace {

using namespace maxbv;

unsigned threads(const benchmark::State& state) { return static_cast<unsigned>(state.range(1)); }

// Running maximum of a 1000-step path per sample.
double path_max(Rng& rng) {
    thread_local std::vector<double> w(1001);
    fill_walk(rng, w);
    double m = 0.0;
    for (double v : w) m = v > m ? v : m;
    return m;
}

void BM_McSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_run_serial(path_max, static_cast<std::size_t>(state.range(0)), {1, 1}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_McParallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mc_run(path_max, static_cast<std::size_t>(state.range(0)), threads(state), {1, 1}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TvBoundSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(tv_bound_discrete_serial(static_cast<std::size_t>(state.range(0)), 1.0));
}

void BM_TvBoundParallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(tv_bound_discrete(static_cast<std::size_t>(state.range(0)), 1.0, threads(state)));
}

void BM_RiemannSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(limit_riemann_sum_serial(static_cast<std::size_t>(state.range(0))));
}

void BM_RiemannParallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(limit_riemann_sum(static_cast<std::size_t>(state.range(0)), threads(state)));
}

void thread_args(benchmark::internal::Benchmark* b, std::int64_t size) {
    const int max = omp_get_num_procs();
    for (int t = 1; t <= max; t *= 2) b->Args({size, t});
    if (max > 1 && (max & (max - 1))) b->Args({size, max});
}

}  // namespace

BENCHMARK(BM_McSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McParallel)->Apply([](auto* b) { thread_args(b, 20000); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TvBoundSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TvBoundParallel)->Apply([](auto* b) { thread_args(b, 2000); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RiemannSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RiemannParallel)->Apply([](auto* b) { thread_args(b, 2000); })->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
