#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "gract/query.hpp"
#include "workload.hpp"

using namespace gract;

namespace {

const TrajectorySet& dataset() {
    static const TrajectorySet data = bench::random_walks(500, 3000, 2048, 42);
    return data;
}

const Index& index_for(Instant period) {
    static std::map<Instant, std::unique_ptr<Index>> cache;
    auto& slot = cache[period];
    if (!slot) slot = std::make_unique<Index>(Index::build(dataset(), {period, 2}));
    return *slot;
}

void run(benchmark::State& state, QueryType type, bool pruning) {
    const Index& index = index_for(static_cast<Instant>(state.range(0)));
    const auto& data = dataset();
    std::mt19937_64 rng(7);
    std::vector<Query> queries;
    for (int i = 0; i < 1000; ++i) {
        queries.push_back(random_query(type, data.object_count(), data.last_instant, data.grid_side, rng));
    }
    QueryOptions opt;
    opt.mbr_pruning = pruning;
    QueryCounters counters;
    std::size_t i = 0, results = 0;
    for (auto _ : state) {
        results += run_query(index, queries[i++ % queries.size()], opt, &counters).size();
    }
    state.counters["results"] = benchmark::Counter(static_cast<double>(results), benchmark::Counter::kAvgIterations);
    state.counters["symbols"] =
        benchmark::Counter(static_cast<double>(counters.symbols_examined), benchmark::Counter::kAvgIterations);
}

void BM_Object(benchmark::State& s) { run(s, QueryType::Object, true); }
void BM_Trajectory(benchmark::State& s) { run(s, QueryType::Trajectory, true); }
void BM_TimeSlice(benchmark::State& s) { run(s, QueryType::TimeSlice, true); }
void BM_TimeInterval(benchmark::State& s) { run(s, QueryType::TimeInterval, true); }
void BM_TimeIntervalNoMbr(benchmark::State& s) { run(s, QueryType::TimeInterval, false); }
void BM_Knn(benchmark::State& s) { run(s, QueryType::Knn, true); }

BENCHMARK(BM_Object)->Arg(30)->Arg(120)->Arg(720);
BENCHMARK(BM_Trajectory)->Arg(30)->Arg(120)->Arg(720);
BENCHMARK(BM_TimeSlice)->Arg(30)->Arg(120)->Arg(720);
BENCHMARK(BM_TimeInterval)->Arg(30)->Arg(120)->Arg(720);
BENCHMARK(BM_TimeIntervalNoMbr)->Arg(30)->Arg(120)->Arg(720);
BENCHMARK(BM_Knn)->Arg(30)->Arg(120)->Arg(720);

}  // namespace

BENCHMARK_MAIN();
