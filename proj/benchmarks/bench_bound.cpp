#include <benchmark/benchmark.h>

#include <vector>

#include "splitlabel/bound.hpp"
#include "splitlabel/bound_check.hpp"
#include "splitlabel/random.hpp"

namespace {

using namespace splitlabel;

std::vector<NodeStats> sample_stats(std::size_t count) {
    Rng rng(1);
    std::vector<NodeStats> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(random_stats(rng));
    }
    return out;
}

void BM_MaximizeBound(benchmark::State& state) {
    const auto stats = sample_stats(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(maximize_bound(stats[i++ & 1023]));
    }
}
BENCHMARK(BM_MaximizeBound);

void BM_GridMaximize(benchmark::State& state) {
    const auto stats = sample_stats(64);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_maximize(stats[i++ & 63], 1e-4));
    }
}
BENCHMARK(BM_GridMaximize);

void BM_MonteCarloCell(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_cell(0.8, static_cast<std::size_t>(state.range(0)),
                                                  1000, 100, 7));
    }
}
BENCHMARK(BM_MonteCarloCell)->Arg(20)->Arg(200);

}  // namespace
