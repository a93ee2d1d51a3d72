#include <benchmark/benchmark.h>

#include "gract/index.hpp"
#include "workload.hpp"

using namespace gract;

namespace {

void BM_Build(benchmark::State& state) {
    const TrajectorySet data = bench::random_walks(200, 2000, 1024, 9);
    const IndexParams params{static_cast<Instant>(state.range(0)), 2};
    IndexStats stats;
    for (auto _ : state) {
        const Index index = Index::build(data, params);
        stats = index.stats();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.fix_count()));
    state.counters["snapshot_bytes"] = static_cast<double>(stats.snapshot_bytes);
    state.counters["log_bytes"] = static_cast<double>(stats.log_bytes + stats.dictionary_bytes);
    state.counters["total_bytes"] = static_cast<double>(stats.total_bytes);
}
BENCHMARK(BM_Build)->Arg(30)->Arg(120)->Arg(720)->Unit(benchmark::kMillisecond);

void BM_Load(benchmark::State& state) {
    const auto bytes = Index::build(bench::random_walks(200, 2000, 1024, 9), {120, 2}).serialize();
    for (auto _ : state) benchmark::DoNotOptimize(Index::deserialize(bytes));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_Load)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
