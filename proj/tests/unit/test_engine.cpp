#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "datasets.hpp"
#include "gract/index.hpp"
#include "gract/oracle.hpp"
#include "gract/query.hpp"

using namespace gract;

namespace {

Index walkthrough_index() {
    IndexParams p;
    p.period = 8;
    return Index::build(fixtures::walkthrough(), p);
}

std::vector<std::string> rendered(const Index& idx, const std::vector<TrajectoryElement>& elems) {
    std::vector<std::string> out;
    for (const auto& e : elems) out.push_back(e.to_string(idx.dictionary()));
    return out;
}

void expect_equivalent(const TrajectorySet& data, const Index& idx, std::size_t queries, std::uint64_t seed,
                       const QueryOptions& opt = {}) {
    const Oracle oracle(data);
    std::mt19937_64 rng(seed);
    for (auto type : kAllQueryTypes) {
        for (std::size_t i = 0; i < queries; ++i) {
            const Query q = random_query(type, data.object_count(), data.last_instant, data.grid_side, rng, 20);
            const auto got = run_query(idx, q, opt);
            const auto want = run_query(oracle, q);
            ASSERT_TRUE(same_answer(got, want)) << q.to_flags() << "\n index:  " << got.to_string()
                                                << "\n oracle: " << want.to_string();
        }
    }
}

}  // namespace

TEST(Walkthrough, SnapshotContents) {
    const Index idx = walkthrough_index();
    ASSERT_EQ(idx.snapshot_count(), 3U);
    ASSERT_EQ(idx.portion_count(), 2U);
    EXPECT_EQ(idx.max_speed(), 1U);
    const Snapshot& s8 = idx.snapshot(1);
    EXPECT_EQ(s8.time(), 8U);
    EXPECT_EQ(s8.find_object(1), (Cell{9, 5}));
    EXPECT_EQ(s8.find_object(2), (Cell{10, 3}));
    EXPECT_EQ(s8.find_object(4), (Cell{4, 2}));
    for (ObjectId o : {0U, 3U, 5U, 6U, 7U}) EXPECT_FALSE(s8.contains(o)) << o;
    EXPECT_EQ(s8.appear(), (std::vector<ObjectId>{3, 5, 6, 7}));
    EXPECT_EQ(s8.disappear(), (std::vector<ObjectId>{3, 5, 6}));

    const auto near = s8.objects_in_region({5, 1, 12, 6});
    std::vector<ObjectId> ids;
    for (const auto& p : near) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, (std::vector<ObjectId>{1, 2}));

    auto stream = s8.candidates_by_distance({10, 0});
    const auto first = stream.next();
    const auto second = stream.next();
    ASSERT_TRUE(first && second);
    EXPECT_EQ(first->id, 2U);
    EXPECT_EQ(first->squared_distance, 9);
    EXPECT_EQ(second->id, 1U);
    EXPECT_EQ(second->squared_distance, 26);
}

TEST(Walkthrough, ExpandedRegion) {
    EXPECT_EQ(expanded_region({7, 3, 10, 4}, 8, 10, 1, 16), (Region{5, 1, 12, 6}));
    EXPECT_EQ(expanded_region({0, 0, 2, 2}, 0, 5, 1, 4), (Region{0, 0, 3, 3}));
    EXPECT_EQ(expanded_region({7, 3, 10, 4}, 8, 10, 2, 16), (Region{3, 0, 14, 8}));
    EXPECT_THROW((void)expanded_region({7, 3, 10, 4}, 10, 8, 1, 16), std::invalid_argument);
}

TEST(Walkthrough, TimeSliceAnswer) {
    const Index idx = walkthrough_index();
    for (const QueryOptions& opt : {QueryOptions{}, QueryOptions{false, false, true}, QueryOptions{true, true, false}}) {
        EXPECT_EQ(idx.time_slice({7, 3, 10, 4}, 10, opt),
                  (std::vector<PlacedObject>{{2, {9, 4}}, {5, {7, 3}}}));
    }
}

TEST(Walkthrough, NearestNeighbourAnswer) {
    const Index idx = walkthrough_index();
    const auto nn = idx.knn(1, {10, 0}, 9);
    ASSERT_EQ(nn.size(), 1U);
    EXPECT_EQ(nn[0].id, 2U);
    EXPECT_EQ(nn[0].squared_distance, 10);
    EXPECT_DOUBLE_EQ(nn[0].distance, std::sqrt(10.0));
    const auto three = idx.knn(3, {10, 0}, 9);
    ASSERT_EQ(three.size(), 3U);
    EXPECT_EQ(three[1].id, 5U);
    EXPECT_EQ(three[2].id, 1U);
}

TEST(Walkthrough, ObjectAndTrajectoryQueries) {
    const Index idx = walkthrough_index();
    EXPECT_EQ(idx.search_object(1, 3), std::nullopt);
    EXPECT_EQ(idx.search_object(1, 5), (Cell{9, 5}));
    EXPECT_EQ(idx.search_object(1, 7), std::nullopt);
    EXPECT_EQ(idx.search_object(5, 6), (Cell{6, 0}));
    EXPECT_EQ(idx.search_object(5, 7), std::nullopt);
    EXPECT_EQ(idx.search_object(7, 15), (Cell{12, 13}));
    EXPECT_EQ(idx.search_object(6, 11), std::nullopt);
    EXPECT_EQ(idx.search_object(99, 1), std::nullopt);
    EXPECT_EQ(idx.search_object(1, 99), std::nullopt);
    EXPECT_EQ(idx.search_trajectory(1, 0, 6),
              (std::vector<TimedCell>{{0, {9, 1}}, {1, {9, 2}}, {5, {9, 5}}}));
}

TEST(Walkthrough, TimeIntervalAnswer) {
    const Index idx = walkthrough_index();
    EXPECT_EQ(idx.time_interval({7, 3, 10, 4}, 8, 10), (std::vector<ObjectId>{2, 5}));
    EXPECT_EQ(idx.time_interval({9, 5, 9, 5}, 2, 4), (std::vector<ObjectId>{}));
    EXPECT_EQ(idx.time_interval({9, 5, 9, 5}, 2, 5), (std::vector<ObjectId>{1}));
}

TEST(Walkthrough, CompressedTrajectoryOfAnAppearance) {
    IndexParams p;
    p.period = 8;
    const Index idx = Index::build(fixtures::appearance_fixture(), p);
    EXPECT_EQ(rendered(idx, idx.ct(5, 11, 15)), (std::vector<std::string>{"AA_11(7,2)", "R0", "D_13(8,4)"}));
    EXPECT_EQ(idx.dictionary().expand(Symbol{idx.dictionary().terminal_boundary()}),
              (std::vector<spiral::Code>{7, 8}));
    const auto from_snapshot = rendered(idx, idx.ct(1, 8, 13));
    EXPECT_EQ(from_snapshot, (std::vector<std::string>{"S(1,1)", "R0", "R0", "0", "D_13(3,5)"}));
}

TEST(Walkthrough, MatchesOracleForEveryPeriod) {
    const TrajectorySet data = fixtures::walkthrough();
    for (Instant d : {1, 2, 3, 5, 7, 8, 16, 17, 100}) {
        for (unsigned k : {2U, 3U}) {
            IndexParams p;
            p.period = d;
            p.k = k;
            const Index idx = Index::build(data, p);
            for (const QueryOptions& opt :
                 {QueryOptions{}, QueryOptions{false, true, true}, QueryOptions{true, false, false}}) {
                expect_equivalent(data, idx, 150, d * 7 + k, opt);
            }
            ASSERT_EQ(idx.reconstruct(), data) << "d=" << d;
        }
    }
}

TEST(Engine, RandomDatasetsMatchOracle) {
    const std::vector<TrajectorySet> sets{
        fixtures::random_walks(20, 150, 64, 61, 1),
        fixtures::walks_with_events(25, 200, 64, 62),
        fixtures::shared_routes(20, 3, 200, 600, 63),
    };
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (Instant d : {4, 30, 77}) {
            IndexParams p;
            p.period = d;
            p.perm_sample_rate = static_cast<unsigned>(1 + i * 3);
            const Index idx = Index::build(sets[i], p);
            expect_equivalent(sets[i], idx, 60, 1000 * i + d);
            EXPECT_EQ(idx.reconstruct(), sets[i]);
        }
    }
}

TEST(Engine, KnnBreaksDistanceTiesById) {
    TrajectorySet data;
    data.grid_side = 8;
    data.last_instant = 6;
    data.objects.resize(5);
    for (Instant t = 0; t <= 6; ++t) {
        data.objects[3].push_back({t, {4, 5}});
        data.objects[1].push_back({t, {5, 4}});
        data.objects[4].push_back({t, {3, 4}});
        data.objects[0].push_back({t, {4, 3}});
    }
    IndexParams p;
    p.period = 4;
    const Index idx = Index::build(data, p);
    for (Instant t : {0, 2, 3, 4, 6}) {
        const auto nn = idx.knn(2, {4, 4}, t);
        ASSERT_EQ(nn.size(), 2U);
        EXPECT_EQ(nn[0].id, 0U);
        EXPECT_EQ(nn[1].id, 1U);
    }
    EXPECT_EQ(idx.knn(10, {4, 4}, 2).size(), 4U);
    EXPECT_TRUE(idx.knn(0, {4, 4}, 2).empty());
}

TEST(Engine, PruningNeverChangesAnswersAndMbrPruningSavesWork) {
    const TrajectorySet data = fixtures::shared_routes(30, 3, 600, 1024, 64);
    IndexParams p;
    p.period = 200;
    const Index idx = Index::build(data, p);
    const Oracle oracle(data);
    std::mt19937_64 rng(65);
    QueryCounters with, without;
    for (int i = 0; i < 100; ++i) {
        const Query q = random_query(QueryType::TimeInterval, data.object_count(), data.last_instant,
                                     data.grid_side, rng, 50);
        const auto a = run_query(idx, q, {true, true, true}, &with);
        const auto b = run_query(idx, q, {false, true, true}, &without);
        ASSERT_TRUE(same_answer(a, b));
        ASSERT_TRUE(same_answer(a, run_query(oracle, q)));
    }
    EXPECT_LT(with.symbols_examined, without.symbols_examined);
}

TEST(Engine, MaxSpeedCoversGaps) {
    TrajectorySet data;
    data.grid_side = 100;
    data.last_instant = 20;
    data.objects = {{{0, {0, 0}}, {1, {3, 4}}}, {{5, {0, 0}}, {10, {50, 0}}}};
    EXPECT_EQ(compute_max_speed(data), 10U);
    data.objects = {{{0, {0, 0}}, {10, {1, 1}}}};
    EXPECT_EQ(compute_max_speed(data), 1U);
    data.objects = {{{0, {0, 0}}, {2, {3, 0}}}};
    EXPECT_EQ(compute_max_speed(data), 2U);
}

TEST(Engine, TrailingPartialPortion) {
    TrajectorySet data = fixtures::random_walks(6, 23, 32, 66, 1);
    IndexParams p;
    p.period = 10;
    const Index idx = Index::build(data, p);
    EXPECT_EQ(idx.snapshot_count(), 3U);
    EXPECT_EQ(idx.portion_count(), 3U);
    expect_equivalent(data, idx, 100, 67);
    EXPECT_EQ(idx.reconstruct(), data);
}

TEST(Engine, RejectsInvalidInput) {
    TrajectorySet data;
    data.grid_side = 4;
    data.last_instant = 3;
    data.objects = {{{0, {4, 0}}}};
    EXPECT_THROW((void)Index::build(data), std::invalid_argument);
    data.objects = {{{1, {0, 0}}, {1, {1, 1}}}};
    EXPECT_THROW((void)Index::build(data), std::invalid_argument);
    data.objects = {{{0, {0, 0}}}};
    IndexParams p;
    p.period = 0;
    EXPECT_THROW((void)Index::build(data, p), std::invalid_argument);
}

TEST(Container, SaveLoadAndDeterminism) {
    const TrajectorySet data = fixtures::walks_with_events(15, 120, 64, 68);
    IndexParams p;
    p.period = 25;
    const Index a = Index::build(data, p);
    const Index b = Index::build(data, p);
    const auto bytes = a.serialize();
    EXPECT_EQ(bytes, b.serialize());
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "GCTI");

    const auto path = std::filesystem::temp_directory_path() / "gract_container_test.gct";
    a.save(path);
    const Index c = Index::load(path);
    EXPECT_EQ(c.serialize(), bytes);
    EXPECT_EQ(c.reconstruct(), data);
    std::filesystem::remove(path);

    const auto stats = a.stats();
    EXPECT_EQ(stats.total_bytes, bytes.size());
    EXPECT_EQ(stats.objects, 15U);
    EXPECT_EQ(stats.period, 25U);
}

TEST(Container, RejectsDamage) {
    const Index idx = walkthrough_index();
    const auto bytes = idx.serialize();
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{6}, bytes.size() / 2, bytes.size() - 1}) {
        std::vector<std::uint8_t> shorter(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
        EXPECT_THROW((void)Index::deserialize(shorter), FormatError) << "cut at " << cut;
    }
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_THROW((void)Index::deserialize(longer), FormatError);
    for (std::size_t pos = 6; pos < bytes.size(); pos += 7) {
        auto flipped = bytes;
        flipped[pos] ^= 0x20;
        EXPECT_THROW((void)Index::deserialize(flipped), FormatError) << "flip at " << pos;
    }
    auto wrong_magic = bytes;
    wrong_magic[0] = 'X';
    EXPECT_THROW((void)Index::deserialize(wrong_magic), FormatError);
    EXPECT_THROW((void)Index::load("/nonexistent/gract.gct"), std::runtime_error);
}

TEST(Container, InjectedFaultIsVisible) {
    const TrajectorySet data = fixtures::walkthrough();
    Index idx = walkthrough_index();
    ASSERT_TRUE(idx.inject_snapshot_fault());
    bool changed = false;
    for (ObjectId o = 0; o < idx.object_count(); ++o) changed |= idx.search_object(o, 0) != data.position(o, 0);
    EXPECT_TRUE(changed);
}
