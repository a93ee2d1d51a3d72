#pragma once

// Synthetic trajectory sets for tests, benchmarks and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include "gract/trajectory.hpp"

namespace gract::fixtures {

/// Every object present at every instant, steps of at most max_step per axis.
TrajectorySet random_walks(std::size_t objects, Instant instants, std::uint64_t side, std::uint64_t seed,
                           std::int64_t max_step = 2);

/// Objects cycling along a handful of shared closed routes, each from its
/// own phase and base point, so many logs repeat the same movements.
TrajectorySet shared_routes(std::size_t objects, std::size_t routes, Instant instants, std::uint64_t side,
                            std::uint64_t seed);

/// Random walks with late starts, early ends, short and long absences, and
/// jumps on reappearance.
TrajectorySet walks_with_events(std::size_t objects, Instant instants, std::uint64_t side, std::uint64_t seed);

struct NamedDataset {
    std::string name;
    TrajectorySet data;
};

/// The three oracle-equivalence datasets.
std::vector<NamedDataset> equivalence_datasets();

/// Seven objects O1..O7 (ids 1..7, id 0 never reported) on a 16 x 16 grid over
/// instants 0..16, moving at most one cell per instant along an axis. With a
/// snapshot every 8 instants, snapshot 8 holds O1@(9,5), O2@(10,3), O4@(4,2);
/// O3, O5 and O6 disappear before it and O3, O5, O6, O7 appear after it.
TrajectorySet walkthrough();

/// O5 appears at 11 at (7,2), moves (0,1) then (1,1) and is last seen at 13
/// at (8,4); O1 repeats that pair of movements so it becomes a rule.
TrajectorySet appearance_fixture();

}  // namespace gract::fixtures
