// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "gract/geometry.hpp"
#include "gract/index.hpp"
#include "gract/k2tree.hpp"
#include "gract/log.hpp"
#include "gract/oracle.hpp"
#include "gract/query.hpp"
#include "gract/spiral.hpp"
#include "gract/succinct.hpp"

using namespace gract;

namespace {

constexpr Instant kPeriods[] = {30, 120, 720};
constexpr std::size_t kQueriesPerType = 500;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

void report(int id, const char* title, const Outcome& o, double seconds) {
    std::printf("criterion %d %-28s %s  (%.1fs)\n", id, title, o.pass ? "PASS" : "FAIL", seconds);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ------------------------------------------------------------------ 1

Outcome documented_examples() {
    Outcome o;
    o.check(spiral::encode({1, 1}) == 8, "spiral (1,1) -> 8");
    o.check(spiral::encode({0, 3}) == 45, "spiral (0,3) -> 45");

    const auto mv = [](spiral::Code c) { return Symbol::move(c).value; };
    const auto dict = RuleDictionary::enrich(14, {{mv(2), mv(9)}, {mv(4), mv(5)}});
    const auto w = dict.rule(0);
    const auto z = dict.rule(1);
    o.check(w.span == 2 && w.disp == Displacement{3, 0} && w.mbr == Region{0, -1, 3, 0}, "enrichment of W -> 2 9");
    o.check(z.span == 2 && z.disp == Displacement{-2, -1} && z.mbr == Region{-2, -1, 0, 0}, "enrichment of Z -> 4 5");

    const Symbol Z{15};
    o.check(move_jump(dict, {9, 5}, 1, 3, Z) == TimedCell{3, {7, 4}}, "moveJ to t3 gives (7,4)");
    o.check(move_jump(dict, {9, 5}, 1, 2, Z) == TimedCell{2, {8, 4}}, "moveJ to t2 gives (8,4)");
    o.check(move_steps(dict, {9, 5}, 1, 3, Z) == std::vector<TimedCell>{{2, {8, 4}}, {3, {7, 4}}}, "moveS steps");

    o.check(expanded_region({7, 3, 10, 4}, 8, 10, 1, 16) == Region{5, 1, 12, 6}, "expanded region [5,12]x[1,6]");

    IndexParams p;
    p.period = 8;
    const Index idx = Index::build(fixtures::walkthrough(), p);
    const auto slice = idx.time_slice({7, 3, 10, 4}, 10);
    o.check(slice == std::vector<PlacedObject>{{2, {9, 4}}, {5, {7, 3}}}, "time-slice gives O2@(9,4), O5@(7,3)");
    const auto nn = idx.knn(1, {10, 0}, 9);
    o.check(nn.size() == 1 && nn[0].id == 2 && std::abs(nn[0].distance - std::sqrt(10.0)) < 1e-12,
            "knn gives O2 at sqrt(10)");
    return o;
}

// ------------------------------------------------------------------ 2, 3, 5

struct Workload {
    std::vector<Query> queries;
    std::vector<QueryAnswer> expected;
};

Workload make_workload(const TrajectorySet& data, std::uint64_t seed) {
    Workload w;
    const Oracle oracle(data);
    std::mt19937_64 rng(seed);
    for (auto type : kAllQueryTypes) {
        for (std::size_t i = 0; i < kQueriesPerType; ++i) {
            w.queries.push_back(random_query(type, data.object_count(), data.last_instant, data.grid_side, rng));
            w.expected.push_back(run_query(oracle, w.queries.back()));
        }
    }
    return w;
}

// Number of queries whose answer differs from the oracle's; the first few
// mismatches are described in `notes`.
std::size_t mismatches(const Index& idx, const Workload& w, const QueryOptions& opt, const std::string& label,
                       Outcome& notes) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < w.queries.size(); ++i) {
        const auto got = run_query(idx, w.queries[i], opt);
        if (!same_answer(got, w.expected[i])) {
            if (++bad <= 3) {
                notes.note(label + ": " + w.queries[i].to_flags() + " -> " + got.to_string() + " expected " +
                           w.expected[i].to_string());
            }
        }
    }
    return bad;
}

// ------------------------------------------------------------------ 6

Outcome structure_properties() {
    Outcome o;
    std::mt19937_64 rng(606);

    // Rank/select laws and DAC access.
    bool rank_ok = true, dac_ok = true;
    for (int trial = 0; trial < 40 && rank_ok; ++trial) {
        const std::size_t n = 1 + rng() % 20000;
        const double density = static_cast<double>(rng() % 101) / 100.0;
        std::bernoulli_distribution coin(density);
        std::vector<bool> bits(n);
        for (std::size_t i = 0; i < n; ++i) bits[i] = coin(rng);
        const BitVector bv(bits);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n && rank_ok; ++i) {
            ones += bits[i];
            rank_ok = bv.rank1(i + 1) == ones;
            if (bits[i]) rank_ok = rank_ok && bv.select1(ones) == i + 1;
            if (!bits[i]) rank_ok = rank_ok && bv.select0(i + 1 - ones) == i + 1;
        }
        std::vector<std::uint64_t> values(1 + rng() % 5000);
        for (auto& v : values) v = rng() >> (rng() % 64);
        for (auto cfg : {DacConfig::optimal(), DacConfig::fixed(8, 2), DacConfig::fixed(5, 0)}) {
            const auto dac = DacSequence::build(values, cfg);
            for (std::size_t i = 0; i < values.size() && dac_ok; ++i) dac_ok = dac[i] == values[i];
        }
    }
    o.check(rank_ok, "rank/select laws on random bitmaps");
    o.check(dac_ok, "DAC random access");

    bool perm_ok = true;
    for (unsigned rate : {1U, 2U, 5U, 32U}) {
        for (std::size_t n : {1UL, 7UL, 1000UL, 20000UL}) {
            std::vector<std::uint64_t> fwd(n);
            std::iota(fwd.begin(), fwd.end(), 1);
            std::shuffle(fwd.begin(), fwd.end(), rng);
            const Permutation perm(fwd, rate);
            for (std::size_t i = 1; i <= n && perm_ok; ++i) perm_ok = perm.pi_inv(perm.pi(i)) == i;
        }
    }
    o.check(perm_ok, "permutation inverses at sample rates 1, 2, 5, 32");

    // k^2-tree against a dense matrix.
    bool k2_ok = true;
    for (int trial = 0; trial < 200 && k2_ok; ++trial) {
        std::vector<std::vector<bool>> m(256, std::vector<bool>(256, false));
        std::vector<Cell> pts;
        const double density = trial % 2 == 0 ? 0.005 : 0.08;
        std::bernoulli_distribution coin(density);
        for (int x = 0; x < 256; ++x) {
            for (int y = 0; y < 256; ++y) {
                if (coin(rng)) {
                    m[x][y] = true;
                    pts.push_back({x, y});
                }
            }
        }
        const auto tree = K2Tree::build(pts, 256, trial % 4 == 3 ? 4 : 2);
        for (const auto& p : pts) {
            const auto r = tree.cell(p);
            k2_ok = k2_ok && r && tree.locate(*r) == p;
        }
        for (int q = 0; q < 5 && k2_ok; ++q) {
            std::int64_t x1 = rng() % 256, x2 = rng() % 256, y1 = rng() % 256, y2 = rng() % 256;
            if (x1 > x2) std::swap(x1, x2);
            if (y1 > y2) std::swap(y1, y2);
            std::size_t expected = 0;
            for (auto x = x1; x <= x2; ++x) {
                for (auto y = y1; y <= y2; ++y) expected += m[x][y];
            }
            const auto got = tree.range({x1, y1, x2, y2});
            k2_ok = got.size() == expected;
            for (const auto& lc : got) k2_ok = k2_ok && m[lc.cell.x][lc.cell.y] && tree.locate(lc.leaf_rank) == lc.cell;
        }
    }
    o.check(k2_ok, "k2-tree range/locate on 200 random 256x256 matrices");

    // Spiral bijection.
    bool spiral_ok = true;
    const std::int64_t radius = 1000;
    const auto total = static_cast<std::uint64_t>((2 * radius + 1) * (2 * radius + 1));
    std::vector<bool> seen(total, false);
    for (std::int64_t dx = -radius; dx <= radius && spiral_ok; ++dx) {
        for (std::int64_t dy = -radius; dy <= radius; ++dy) {
            const auto c = spiral::encode({dx, dy});
            if (c >= total || seen[c] || spiral::decode(c) != Displacement{dx, dy}) {
                spiral_ok = false;
                break;
            }
            seen[c] = true;
        }
    }
    o.check(spiral_ok, "spiral bijection up to radius 1000");

    // Grammar round trip and enrichment against brute force.
    bool grammar_ok = true;
    for (int trial = 0; trial < 1000 && grammar_ok; ++trial) {
        const std::uint64_t codes = 1 + rng() % 30;
        const std::uint64_t boundary = kEventSymbols + codes;
        std::vector<std::vector<std::uint64_t>> streams(1 + rng() % 4);
        for (auto& s : streams) {
            s.resize(rng() % 80);
            for (auto& v : s) v = rng() % 20 == 0 ? rng() % kEventSymbols : kEventSymbols + rng() % std::min<std::uint64_t>(codes, 4);
        }
        const auto rp = repair_compress(streams, boundary);
        const auto dict = RuleDictionary::enrich(boundary, rp.rules);
        for (std::size_t i = 0; i < streams.size() && grammar_ok; ++i) {
            std::vector<std::uint64_t> flat;
            for (auto v : rp.streams[i]) {
                if (v < boundary) {
                    flat.push_back(v);
                } else {
                    for (auto c : dict.expand(Symbol{v})) flat.push_back(c + kEventSymbols);
                }
            }
            grammar_ok = flat == streams[i];
        }
        for (std::size_t r = 0; r < rp.rules.size() && grammar_ok; ++r) {
            Cell p{0, 0};
            Region box{0, 0, 0, 0};
            const auto codes_of = dict.expand(Symbol{boundary + r});
            for (auto c : codes_of) {
                p = p + spiral::decode(c);
                box = {std::min(box.x1, p.x), std::min(box.y1, p.y), std::max(box.x2, p.x), std::max(box.y2, p.y)};
            }
            const auto e = dict.rule(r);
            grammar_ok = e.span == codes_of.size() && e.disp == p - Cell{0, 0} && e.mbr == box;
        }
    }
    o.check(grammar_ok, "grammar round trip and enrichment on 1000 random grammars");
    return o;
}

}  // namespace

int main() {
    bool all = true;
    const auto clock = [] { return std::chrono::steady_clock::now(); };
    const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };

    {
        const auto t0 = clock();
        const Outcome o = documented_examples();
        report(1, "documented examples", o, secs(t0, clock()));
        all &= o.pass;
    }

    const auto datasets = fixtures::equivalence_datasets();

    Outcome equivalence, roundtrip, compression, pruning, determinism;
    double t_equivalence = 0, t_roundtrip = 0, t_compression = 0, t_pruning = 0, t_determinism = 0;
    std::map<Instant, std::size_t> shared_snapshot_bytes;

    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const auto& [name, data] = datasets[di];
        const Workload work = make_workload(data, 1000 + di);
        std::size_t movements = 0;
        for (const auto& fixes : data.objects) {
            for (std::size_t i = 1; i < fixes.size(); ++i) movements += fixes[i].t == fixes[i - 1].t + 1;
        }

        for (Instant d : kPeriods) {
            IndexParams p;
            p.period = d;
            const std::string label = name + " d=" + std::to_string(d);

            auto t0 = clock();
            const Index idx = Index::build(data, p);
            const std::size_t bad = mismatches(idx, work, {}, label, equivalence);
            equivalence.check(bad == 0, label + ": " + std::to_string(bad) + " of " +
                                            std::to_string(work.queries.size()) + " answers differ from the oracle");
            t_equivalence += secs(t0, clock());

            t0 = clock();
            roundtrip.check(idx.reconstruct() == data, label + ": reconstruction differs from the input");
            t_roundtrip += secs(t0, clock());

            t0 = clock();
            for (const QueryOptions& opt : {QueryOptions{false, true, true}, QueryOptions{true, false, true},
                                            QueryOptions{false, false, true}, QueryOptions{true, true, false}}) {
                const std::string variant = label + (opt.mbr_pruning ? "" : " no-mbr") + (opt.er_pruning ? "" : " no-er") +
                                            (opt.nearest_snapshot ? "" : " preceding-snapshot");
                const std::size_t b = mismatches(idx, work, opt, variant, pruning);
                pruning.check(b == 0, variant + ": " + std::to_string(b) + " answers changed");
            }
            t_pruning += secs(t0, clock());

            t0 = clock();
            const auto stats = idx.stats();
            if (name == "shared-routes") {
                const double ratio = static_cast<double>(stats.log_bytes + stats.dictionary_bytes) /
                                     static_cast<double>(movements);
                compression.note(label + ": " + std::to_string(movements) + " movements, log+dictionary " +
                                 std::to_string(stats.log_bytes + stats.dictionary_bytes) + " bytes = " +
                                 fmt("%.1f%%", 100 * ratio) + " of 1 byte per movement, snapshots " +
                                 std::to_string(stats.snapshot_bytes) + " bytes, " + std::to_string(stats.rules) +
                                 " rules");
                compression.check(movements >= 100000, "shared-routes has at least 1e5 movements");
                compression.check(ratio <= 0.5, label + ": log+dictionary above 50% of the raw baseline");
                shared_snapshot_bytes[d] = stats.snapshot_bytes;

                // Work saved by MBR pruning on time-interval queries.
                QueryCounters with, without;
                for (std::size_t i = 0; i < work.queries.size(); ++i) {
                    if (work.queries[i].type != QueryType::TimeInterval) continue;
                    (void)run_query(idx, work.queries[i], {true, true, true}, &with);
                    (void)run_query(idx, work.queries[i], {false, true, true}, &without);
                }
                pruning.note(label + ": time-interval symbols examined " + std::to_string(with.symbols_examined) +
                             " with MBR pruning, " + std::to_string(without.symbols_examined) + " without");
                pruning.check(with.symbols_examined < without.symbols_examined,
                              label + ": MBR pruning does not reduce the symbols examined");
            }
            t_compression += secs(t0, clock());

            t0 = clock();
            const auto bytes = idx.serialize();
            const auto again = Index::build(data, p).serialize();
            determinism.check(bytes == again, label + ": two builds differ");
            const auto path = std::filesystem::temp_directory_path() / ("gract_acceptance_" + std::to_string(di) + ".gct");
            idx.save(path);
            const Index loaded = Index::load(path);
            determinism.check(loaded.serialize() == bytes, label + ": save/load is not bit-exact");
            std::filesystem::remove(path);
            std::size_t accepted = 0;
            for (std::size_t cut : {std::size_t{0}, std::size_t{5}, bytes.size() / 3, bytes.size() / 2, bytes.size() - 4,
                                    bytes.size() - 1}) {
                try {
                    (void)Index::deserialize(std::span(bytes).first(cut));
                    ++accepted;
                } catch (const FormatError&) {
                }
            }
            auto flipped = bytes;
            flipped[bytes.size() / 2] ^= 0x01;
            try {
                (void)Index::deserialize(flipped);
                ++accepted;
            } catch (const FormatError&) {
            }
            determinism.check(accepted == 0, label + ": " + std::to_string(accepted) + " damaged files accepted");
            t_determinism += secs(t0, clock());
        }
    }
    compression.check(shared_snapshot_bytes[30] > shared_snapshot_bytes[120] &&
                          shared_snapshot_bytes[120] > shared_snapshot_bytes[720],
                      "snapshot bytes do not strictly decrease from d=30 to d=720");

    report(2, "oracle equivalence", equivalence, t_equivalence);
    report(3, "lossless round trip", roundtrip, t_roundtrip);
    report(4, "compression", compression, t_compression);
    report(5, "pruning soundness", pruning, t_pruning);
    all &= equivalence.pass && roundtrip.pass && compression.pass && pruning.pass;

    {
        const auto t0 = clock();
        const Outcome o = structure_properties();
        report(6, "structure properties", o, secs(t0, clock()));
        all &= o.pass;
    }
    report(7, "determinism and integrity", determinism, t_determinism);
    all &= determinism.pass;

    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
