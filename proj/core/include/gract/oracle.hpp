#pragma once

// Brute-force reference answers by linear scans over dense timelines.

#include <cstdint>
#include <optional>
#include <vector>

#include "gract/index.hpp"
#include "gract/trajectory.hpp"

namespace gract {

class Oracle {
public:
    Oracle() = default;
    explicit Oracle(const TrajectorySet& data);

    [[nodiscard]] std::size_t object_count() const { return timelines_.size(); }
    [[nodiscard]] Instant last_instant() const { return last_instant_; }
    [[nodiscard]] std::uint64_t grid_side() const { return grid_side_; }

    [[nodiscard]] std::optional<Cell> search_object(ObjectId o, Instant t) const;
    [[nodiscard]] std::vector<TimedCell> search_trajectory(ObjectId o, Instant t_b, Instant t_e) const;
    [[nodiscard]] std::vector<PlacedObject> time_slice(const Region& r, Instant t) const;
    [[nodiscard]] std::vector<ObjectId> time_interval(const Region& r, Instant t_b, Instant t_e) const;
    [[nodiscard]] std::vector<Neighbor> knn(std::size_t k, Cell q, Instant t) const;

private:
    struct Timeline {
        Instant first = 0;
        std::vector<std::int32_t> xy;  // x, y per instant; x < 0 when absent
    };

    Instant last_instant_ = 0;
    std::uint64_t grid_side_ = 0;
    std::vector<Timeline> timelines_;
};

}  // namespace gract
