#include <benchmark/benchmark.h>

#include "splitlabel/dataset.hpp"
#include "splitlabel/engine.hpp"
#include "splitlabel/oracle.hpp"

namespace {

using namespace splitlabel;

void run_once(benchmark::State& state, SplitterKind kind, double training_ratio) {
    const Dataset data = gen_noise_dims(3, static_cast<std::size_t>(state.range(0)), 2, 20, 4);
    RunConfig config;
    config.budget = 100;
    config.seed = 5;
    config.training_ratio = training_ratio;
    config.splitter.kind = kind;
    for (auto _ : state) {
        SimulatedOracle oracle(data);
        benchmark::DoNotOptimize(run(config, data, oracle));
    }
}

void BM_RunLogistic(benchmark::State& state) { run_once(state, SplitterKind::logistic, 0.5); }
BENCHMARK(BM_RunLogistic)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RunKMeans(benchmark::State& state) { run_once(state, SplitterKind::kmeans2, 0.0); }
BENCHMARK(BM_RunKMeans)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ComputeScores(benchmark::State& state) {
    const Dataset data = gen_blobs(4, 2000, 2, 4, 2.0);
    RunConfig config;
    config.budget = 80;
    Engine engine(config, data);
    SimulatedOracle oracle(data);
    while (engine.step(oracle)) {
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(engine.compute_scores());
    }
}
BENCHMARK(BM_ComputeScores);

}  // namespace
