#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "gract/spiral.hpp"
#include "gract/succinct.hpp"

using namespace gract;

namespace {

BitVector random_bitvector(std::size_t n, double density) {
    std::mt19937_64 rng(1);
    std::bernoulli_distribution coin(density);
    std::vector<bool> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = coin(rng);
    return BitVector(bits);
}

void BM_Rank1(benchmark::State& state) {
    const auto bv = random_bitvector(static_cast<std::size_t>(state.range(0)), 0.5);
    std::mt19937_64 rng(2);
    for (auto _ : state) benchmark::DoNotOptimize(bv.rank1(rng() % (bv.size() + 1)));
}
BENCHMARK(BM_Rank1)->Range(1 << 12, 1 << 24);

void BM_Select1(benchmark::State& state) {
    const auto bv = random_bitvector(static_cast<std::size_t>(state.range(0)), 0.5);
    std::mt19937_64 rng(3);
    const auto ones = bv.count_ones();
    for (auto _ : state) benchmark::DoNotOptimize(bv.select1(1 + rng() % ones));
}
BENCHMARK(BM_Select1)->Range(1 << 12, 1 << 24);

void BM_DacAccess(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::geometric_distribution<unsigned> bits(0.2);
    std::vector<std::uint64_t> values(1 << 20);
    for (auto& v : values) v = rng() & ((std::uint64_t{1} << std::min(bits(rng), 40U)) - 1);
    const auto dac = DacSequence::build(values);
    for (auto _ : state) benchmark::DoNotOptimize(dac[rng() % values.size()]);
}
BENCHMARK(BM_DacAccess);

void BM_PermutationInverse(benchmark::State& state) {
    const std::size_t n = 1 << 18;
    std::vector<std::uint64_t> fwd(n);
    for (std::size_t i = 0; i < n; ++i) fwd[i] = i + 1;
    std::mt19937_64 rng(5);
    std::shuffle(fwd.begin(), fwd.end(), rng);
    const Permutation perm(fwd, static_cast<unsigned>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(perm.pi_inv(1 + rng() % n));
}
BENCHMARK(BM_PermutationInverse)->Arg(2)->Arg(8)->Arg(32);

void BM_SpiralRoundTrip(benchmark::State& state) {
    std::mt19937_64 rng(6);
    for (auto _ : state) {
        const Displacement d{static_cast<std::int64_t>(rng() % 201) - 100, static_cast<std::int64_t>(rng() % 201) - 100};
        benchmark::DoNotOptimize(spiral::decode(spiral::encode(d)));
    }
}
BENCHMARK(BM_SpiralRoundTrip);

}  // namespace

BENCHMARK_MAIN();
