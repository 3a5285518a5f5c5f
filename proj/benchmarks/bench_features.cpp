#include <benchmark/benchmark.h>

#include "rewrite_rl/features.hpp"
#include "rewrite_rl/parser.hpp"
#include "rewrite_rl/rules.hpp"
#include "rewrite_rl/serialize.hpp"

using namespace rewrite_rl;

namespace {

const std::string& convolution_source() {
    static const std::string src = read_file(std::string(REWRITE_RL_DATA_DIR) + "/convolution.c");
    return src;
}

void BM_Parse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(parse(convolution_source()));
}
BENCHMARK(BM_Parse);

void BM_ParseAndExtract(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(extract(parse(convolution_source())));
}
BENCHMARK(BM_ParseAndExtract);

void BM_FindSites(benchmark::State& state) {
    auto unit = parse(convolution_source());
    auto rules = RuleRegistry::with_defaults();
    for (auto _ : state) {
        benchmark::DoNotOptimize(rules.find_sites(unit, kFlattenArray));
        benchmark::DoNotOptimize(rules.find_sites(unit, kCollapseLoops));
    }
}
BENCHMARK(BM_FindSites);

}  // namespace
