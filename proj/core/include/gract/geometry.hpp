#pragma once

#include <cmath>
#include <cstdint>

#include "gract/types.hpp"

namespace gract {

/// Squared Euclidean distance between two cells.
[[nodiscard]] constexpr std::int64_t squared_distance(const Cell& p, const Cell& q) {
    const std::int64_t dx = p.x - q.x;
    const std::int64_t dy = p.y - q.y;
    return dx * dx + dy * dy;
}

/// Squared distance from p to the nearest cell of r; 0 when p lies in r.
[[nodiscard]] constexpr std::int64_t squared_distance(const Cell& p, const Region& r) {
    const std::int64_t dx = p.x < r.x1 ? r.x1 - p.x : (p.x > r.x2 ? p.x - r.x2 : 0);
    const std::int64_t dy = p.y < r.y1 ? r.y1 - p.y : (p.y > r.y2 ? p.y - r.y2 : 0);
    return dx * dx + dy * dy;
}

[[nodiscard]] inline double distance(const Cell& p, const Cell& q) {
    return std::sqrt(static_cast<double>(squared_distance(p, q)));
}

[[nodiscard]] inline double distance(const Cell& p, const Region& r) {
    return std::sqrt(static_cast<double>(squared_distance(p, r)));
}

/// r grown by `delta` cells on every side and clamped to [0, side-1]^2.
[[nodiscard]] constexpr Region expand_region(const Region& r, std::int64_t delta, std::int64_t side) {
    return Region{std::max<std::int64_t>(0, r.x1 - delta), std::max<std::int64_t>(0, r.y1 - delta),
                  std::min<std::int64_t>(side - 1, r.x2 + delta), std::min<std::int64_t>(side - 1, r.y2 + delta)};
}

/// The single-cell region [c] x [c].
[[nodiscard]] constexpr Region cell_region(const Cell& c) { return {c.x, c.y, c.x, c.y}; }

}  // namespace gract
