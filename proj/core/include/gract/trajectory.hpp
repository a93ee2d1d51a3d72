#pragma once

// Discretized, regular trajectories: for each object, the instants at which it
// is reported and its cell at each of them.

#include <cstdint>
#include <optional>
#include <vector>

#include "gract/types.hpp"

namespace gract {

struct Fix {
    Instant t = 0;
    Cell cell;

    friend constexpr bool operator==(const Fix&, const Fix&) = default;
};

struct TrajectorySet {
    std::uint64_t grid_side = 0;
    Instant last_instant = 0;
    std::vector<std::vector<Fix>> objects;  // indexed by object id, strictly increasing t

    friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;

    [[nodiscard]] std::size_t object_count() const { return objects.size(); }
    [[nodiscard]] std::size_t fix_count() const;
    [[nodiscard]] bool empty() const { return fix_count() == 0; }

    [[nodiscard]] std::optional<Cell> position(ObjectId o, Instant t) const;

    /// Throws std::invalid_argument unless instants strictly increase, every
    /// cell lies in the grid and every instant is <= last_instant.
    void validate() const;

    /// Sets grid_side and last_instant to the smallest values covering the data.
    void fit_extent();
};

}  // namespace gract
