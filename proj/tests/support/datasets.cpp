#include "datasets.hpp"

#include <algorithm>
#include <random>

namespace gract::fixtures {

namespace {

std::int64_t clamp_coord(std::int64_t v, std::uint64_t side) {
    return std::clamp<std::int64_t>(v, 0, static_cast<std::int64_t>(side) - 1);
}

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

TrajectorySet empty_set(std::size_t objects, Instant instants, std::uint64_t side) {
    TrajectorySet data;
    data.grid_side = side;
    data.last_instant = instants == 0 ? 0 : instants - 1;
    data.objects.resize(objects);
    return data;
}

}  // namespace

TrajectorySet random_walks(std::size_t objects, Instant instants, std::uint64_t side, std::uint64_t seed,
                           std::int64_t max_step) {
    std::mt19937_64 rng(seed);
    TrajectorySet data = empty_set(objects, instants, side);
    const auto s = static_cast<std::int64_t>(side);
    for (auto& fixes : data.objects) {
        Cell c{uniform(rng, 0, s - 1), uniform(rng, 0, s - 1)};
        for (Instant t = 0; t < instants; ++t) {
            fixes.push_back({t, c});
            c = {clamp_coord(c.x + uniform(rng, -max_step, max_step), side),
                 clamp_coord(c.y + uniform(rng, -max_step, max_step), side)};
        }
    }
    return data;
}

TrajectorySet shared_routes(std::size_t objects, std::size_t routes, Instant instants, std::uint64_t side,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrajectorySet data = empty_set(objects, instants, side);
    const auto s = static_cast<std::int64_t>(side);

    // Closed loops: a wandering outbound leg followed by its exact return.
    std::vector<std::vector<Displacement>> loops(routes);
    for (auto& loop : loops) {
        const auto half = static_cast<std::size_t>(uniform(rng, 150, 300));
        Displacement heading{1, 0};
        std::vector<Displacement> out;
        for (std::size_t i = 0; i < half; ++i) {
            if (uniform(rng, 0, 9) == 0) heading = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
            out.push_back(heading);
        }
        loop = out;
        for (auto it = out.rbegin(); it != out.rend(); ++it) loop.push_back(-*it);
    }

    for (std::size_t o = 0; o < objects; ++o) {
        const auto& loop = loops[o % routes];
        std::vector<Cell> offsets{{0, 0}};
        for (const auto& d : loop) offsets.push_back(offsets.back() + d);
        offsets.pop_back();
        std::int64_t lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
        for (const auto& c : offsets) {
            lo_x = std::min(lo_x, c.x);
            hi_x = std::max(hi_x, c.x);
            lo_y = std::min(lo_y, c.y);
            hi_y = std::max(hi_y, c.y);
        }
        const Cell base{uniform(rng, -lo_x, s - 1 - hi_x), uniform(rng, -lo_y, s - 1 - hi_y)};
        const auto phase = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(loop.size()) - 1));
        for (Instant t = 0; t < instants; ++t) {
            const Cell& off = offsets[(phase + t) % offsets.size()];
            data.objects[o].push_back({t, {base.x + off.x, base.y + off.y}});
        }
    }
    return data;
}

TrajectorySet walks_with_events(std::size_t objects, Instant instants, std::uint64_t side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrajectorySet data = empty_set(objects, instants, side);
    const auto s = static_cast<std::int64_t>(side);
    const auto last = static_cast<std::int64_t>(instants) - 1;
    for (auto& fixes : data.objects) {
        const Instant start = uniform(rng, 0, 9) < 3 ? 0 : static_cast<Instant>(uniform(rng, 0, last / 4));
        const Instant end = uniform(rng, 0, 9) < 3 ? static_cast<Instant>(last)
                                                   : static_cast<Instant>(uniform(rng, 3 * last / 4, last));
        Cell c{uniform(rng, 0, s - 1), uniform(rng, 0, s - 1)};
        Instant t = start;
        while (t <= end) {
            fixes.push_back({t, c});
            if (uniform(rng, 0, 99) == 0) {
                t += static_cast<Instant>(uniform(rng, 2, 60));
                if (uniform(rng, 0, 2) != 0) {
                    c = {clamp_coord(c.x + uniform(rng, -4, 4), side), clamp_coord(c.y + uniform(rng, -4, 4), side)};
                }
            } else {
                t += 1;
                c = {clamp_coord(c.x + uniform(rng, -1, 1), side), clamp_coord(c.y + uniform(rng, -1, 1), side)};
            }
        }
    }
    return data;
}

std::vector<NamedDataset> equivalence_datasets() {
    return {
        {"random-walks", random_walks(60, 2000, 512, 11)},
        {"shared-routes", shared_routes(100, 5, 1500, 1024, 12)},
        {"walks-with-events", walks_with_events(80, 2000, 512, 13)},
    };
}

namespace {

void put(TrajectorySet& data, ObjectId o, Instant t, std::int64_t x, std::int64_t y) {
    data.objects[o].push_back({t, {x, y}});
}

}  // namespace

TrajectorySet walkthrough() {
    TrajectorySet data;
    data.grid_side = 16;
    data.last_instant = 16;
    data.objects.resize(8);

    // O1: seen at 0 and 1, jumps 3 cells north after a gap, pauses in place
    // across the snapshot at 8, then heads north.
    put(data, 1, 0, 9, 1);
    put(data, 1, 1, 9, 2);
    put(data, 1, 5, 9, 5);
    for (Instant t = 8; t <= 16; ++t) put(data, 1, t, 9, 5 + static_cast<std::int64_t>(t - 8));

    // O2: south along x=10 to (10,3) at 8, one west, then north.
    for (Instant t = 0; t <= 8; ++t) put(data, 2, t, 10, 11 - static_cast<std::int64_t>(t));
    for (Instant t = 9; t <= 16; ++t) put(data, 2, t, 9, 3 + static_cast<std::int64_t>(t - 9));

    // O3: north to (7,9) at 5, gone until 12, back at (4,8).
    for (Instant t = 0; t <= 5; ++t) put(data, 3, t, 7, 4 + static_cast<std::int64_t>(t));
    for (Instant t = 12; t <= 16; ++t) put(data, 3, t, 4, 8 + static_cast<std::int64_t>(t - 12));

    // O4: parked at (4,2).
    for (Instant t = 0; t <= 16; ++t) put(data, 4, t, 4, 2);

    // O5: south to (6,0), gone over the snapshot, appears at (7,2) at 9.
    for (Instant t = 0; t <= 4; ++t) put(data, 5, t, 6, 4 - static_cast<std::int64_t>(t));
    put(data, 5, 5, 6, 0);
    put(data, 5, 6, 6, 0);
    for (Instant t = 9; t <= 16; ++t) put(data, 5, t, 7, 2 + static_cast<std::int64_t>(t - 9));

    // O6: north to (10,15), gone from 5 to 11, reappears at (5,11).
    put(data, 6, 0, 10, 13);
    put(data, 6, 1, 10, 14);
    put(data, 6, 2, 10, 15);
    put(data, 6, 3, 10, 15);
    put(data, 6, 4, 10, 15);
    for (Instant t = 12; t <= 16; ++t) put(data, 6, t, 5, 11 + static_cast<std::int64_t>(t - 12) / 2);

    // O7: first seen at 14.
    for (Instant t = 14; t <= 16; ++t) put(data, 7, t, 12, 12 + static_cast<std::int64_t>(t - 14));
    return data;
}

TrajectorySet appearance_fixture() {
    TrajectorySet data;
    data.grid_side = 16;
    data.last_instant = 16;
    data.objects.resize(6);

    put(data, 5, 11, 7, 2);
    put(data, 5, 12, 7, 3);
    put(data, 5, 13, 8, 4);

    // O1 repeats the (0,1), (1,1) pair twice in the same portion.
    put(data, 1, 8, 1, 1);
    put(data, 1, 9, 1, 2);
    put(data, 1, 10, 2, 3);
    put(data, 1, 11, 2, 4);
    put(data, 1, 12, 3, 5);
    put(data, 1, 13, 3, 5);
    return data;
}

}  // namespace gract::fixtures
