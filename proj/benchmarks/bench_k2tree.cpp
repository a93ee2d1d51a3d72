#include <benchmark/benchmark.h>

#include <random>
#include <set>

#include "gract/k2tree.hpp"

using namespace gract;

namespace {

std::vector<Cell> random_points(std::size_t n, std::int64_t side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<Cell> seen;
    while (seen.size() < n) seen.insert({static_cast<std::int64_t>(rng() % side), static_cast<std::int64_t>(rng() % side)});
    return {seen.begin(), seen.end()};
}

void BM_K2TreeBuild(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1 << 14, 1);
    for (auto _ : state) benchmark::DoNotOptimize(K2Tree::build(pts, 1 << 14, 2));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_K2TreeBuild)->Arg(1000)->Arg(100000);

void BM_K2TreeRange(benchmark::State& state) {
    const std::int64_t side = 1 << 14;
    const auto pts = random_points(100000, side, 2);
    const auto tree = K2Tree::build(pts, side, static_cast<unsigned>(state.range(1)));
    const std::int64_t w = state.range(0);
    std::mt19937_64 rng(3);
    std::size_t found = 0;
    for (auto _ : state) {
        const std::int64_t x = static_cast<std::int64_t>(rng() % (side - w)), y = static_cast<std::int64_t>(rng() % (side - w));
        found += tree.range({x, y, x + w - 1, y + w - 1}).size();
    }
    state.counters["cells"] = benchmark::Counter(static_cast<double>(found), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_K2TreeRange)->ArgsProduct({{64, 512, 4096}, {2, 4}});

void BM_K2TreeLocate(benchmark::State& state) {
    const auto pts = random_points(100000, 1 << 14, 4);
    const auto tree = K2Tree::build(pts, 1 << 14, 2);
    std::mt19937_64 rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(tree.locate(1 + rng() % pts.size()));
}
BENCHMARK(BM_K2TreeLocate);

}  // namespace

BENCHMARK_MAIN();
