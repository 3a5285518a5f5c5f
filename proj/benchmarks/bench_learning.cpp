#include <benchmark/benchmark.h>

#include <random>

#include "rewrite_rl/classify.hpp"
#include "rewrite_rl/qlearning.hpp"
#include "rewrite_rl/serialize.hpp"

using namespace rewrite_rl;

namespace {

std::string data(const char* name) { return read_file(std::string(REWRITE_RL_DATA_DIR) + "/" + name); }

void BM_TrainConvolution(benchmark::State& state) {
    auto graph = graph_from_json(data("convolution_graph.json"));
    LearnConfig cfg;
    cfg.episodes = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train(graph, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainConvolution)->Arg(500)->Arg(10000);

// Chain of n states with a backward action at each, reward at the end.
void BM_TrainChain(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    TrainingGraph graph;
    for (std::size_t i = 0; i < n; ++i) {
        StateKey from("s" + std::to_string(i));
        graph.add_transition(from, RuleId{0}, i + 1 == n ? StateKey("F") : StateKey("s" + std::to_string(i + 1)));
        graph.add_transition(from, RuleId{1}, StateKey("s0"));
    }
    graph.add_final(StateKey("F"), 100.0);
    LearnConfig cfg;
    cfg.episodes = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(train(graph, cfg));
}
BENCHMARK(BM_TrainChain)->Arg(8)->Arg(64);

void BM_FitCorpus(benchmark::State& state) {
    auto samples = corpus_from_json(data("corpus.json"));
    for (auto _ : state) benchmark::DoNotOptimize(fit(samples));
}
BENCHMARK(BM_FitCorpus);

void BM_FitRandom(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto classes = platform_classes();
    std::vector<LabeledSample> samples;
    for (int i = 0; i < state.range(0); ++i) {
        FeatureVector x;
        for (std::size_t f = 0; f < kFeatureCount; ++f) x[f] = static_cast<std::int64_t>(rng() % 8);
        samples.push_back({x, classes[rng() % classes.size()]});
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit(samples));
}
BENCHMARK(BM_FitRandom)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
