#pragma once

#include <algorithm>
#include <random>

#include "gract/trajectory.hpp"

namespace gract::bench {

// Bounded random walks: each object starts somewhere on the grid and moves up
// to two cells per axis per instant; about one object in ten leaves for a
// while and comes back.
inline TrajectorySet random_walks(std::size_t objects, Instant instants, std::int64_t side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> start(0, side - 1), step(-2, 2);
    std::bernoulli_distribution leave(0.001);
    TrajectorySet data;
    data.objects.resize(objects);
    for (auto& fixes : data.objects) {
        Cell c{start(rng), start(rng)};
        for (Instant t = 0; t < instants; ++t) {
            if (leave(rng)) {
                t += 1 + rng() % 40;
                if (t >= instants) break;
            }
            c.x = std::clamp<std::int64_t>(c.x + step(rng), 0, side - 1);
            c.y = std::clamp<std::int64_t>(c.y + step(rng), 0, side - 1);
            fixes.push_back({t, c});
        }
    }
    data.grid_side = static_cast<std::uint64_t>(side);
    data.last_instant = instants - 1;
    return data;
}

}  // namespace gract::bench
