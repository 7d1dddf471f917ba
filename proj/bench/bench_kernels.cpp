#include <benchmark/benchmark.h>

#include <map>

#include <omp.h>

#include "mcpflow/datagen.hpp"
#include "mcpflow/objective.hpp"
#include "mcpflow/random.hpp"

using namespace mcpflow;

namespace {

struct Problem {
    std::vector<TrainSample> samples;
    ParameterMatrix theta;
};

const Problem& problem(std::size_t subjects) {
    static std::map<std::size_t, Problem> cache;
    auto it = cache.find(subjects);
    if (it != cache.end()) return it->second;
    GeneratorConfig cfg;
    cfg.num_subjects = static_cast<int>(subjects);
    cfg.labels = {8, 8};
    cfg.layout = {40, 200};
    cfg.seed = 1;
    const auto data = generate(cfg);
    Problem p{build_training_samples(data.sequences, cfg.kernel, cfg.layout), data.planted};
    return cache.emplace(subjects, std::move(p)).first->second;
}

void BM_LossGradientSerial(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::loss_and_gradient(p.theta, p.samples));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.samples.size()));
}

void BM_LossGradientParallel(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(p.theta, p.samples));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.samples.size()));
    state.counters["threads"] = static_cast<double>(state.range(1));
}

void BM_TrainingSamples(benchmark::State& state) {
    GeneratorConfig cfg;
    cfg.num_subjects = static_cast<int>(state.range(0));
    cfg.layout = {40, 200};
    const auto data = generate(cfg);
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_training_samples(data.sequences, cfg.kernel, cfg.layout));
}

}  // namespace

BENCHMARK(BM_LossGradientSerial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossGradientParallel)
    ->ArgsProduct({{200, 2000}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_TrainingSamples)->ArgsProduct({{2000}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
