#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "scribe/memory.hpp"
#include "scribe/prompt.hpp"

using namespace scribe;

namespace {

EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(rng);
    return EmbeddingVector::normalized(std::move(v));
}

void bm_retrieve(benchmark::State& bench) {
    const auto n = static_cast<std::size_t>(bench.range(0));
    const std::size_t dim = 256;
    std::mt19937_64 rng(1);
    LongTermMemory store(dim);
    for (std::size_t t = 0; t < n; ++t) store.append(Content("entry", t), random_unit(rng, dim));
    const auto query = random_unit(rng, dim);
    for (auto _ : bench) benchmark::DoNotOptimize(store.retrieve(query, 5));
    bench.SetItemsProcessed(bench.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_retrieve)->Arg(1000)->Arg(10000);

void bm_parse_step_output(benchmark::State& bench) {
    const auto raw = testing::well_formed_step(1);
    for (auto _ : bench) benchmark::DoNotOptimize(parse_step_output(raw, 3, 0));
    bench.SetBytesProcessed(bench.iterations() * static_cast<std::int64_t>(raw.size()));
}
BENCHMARK(bm_parse_step_output);

void bm_build_generation_prompt(benchmark::State& bench) {
    auto mock = testing::mock_engine(MockScript{{}, 5});
    auto state = mock.engine->init_session(testing::writer_meta(), 5, {});
    mock.engine->run_autonomous(state, 10);
    const auto query = state.long_term->latest()->embedding;
    const auto retrieved = state.long_term->retrieve(query, 3);
    const PromptConfig config;
    for (auto _ : bench) {
        benchmark::DoNotOptimize(build_generation_prompt(state, retrieved, state.pending_plans[0], config));
    }
}
BENCHMARK(bm_build_generation_prompt);

}  // namespace

BENCHMARK_MAIN();
