#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gract {

using Instant = std::uint64_t;
using ObjectId = std::uint32_t;

/// A grid cell. x grows east, y grows north.
struct Cell {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr bool operator==(const Cell&, const Cell&) = default;
    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Relative movement between two cells.
struct Displacement {
    std::int64_t dx = 0;
    std::int64_t dy = 0;

    friend constexpr bool operator==(const Displacement&, const Displacement&) = default;

    constexpr Displacement& operator+=(const Displacement& o) {
        dx += o.dx;
        dy += o.dy;
        return *this;
    }
    friend constexpr Displacement operator+(Displacement a, const Displacement& b) { return a += b; }
    friend constexpr Displacement operator-(const Displacement& a) { return {-a.dx, -a.dy}; }
};

constexpr Cell operator+(const Cell& c, const Displacement& d) { return {c.x + d.dx, c.y + d.dy}; }
constexpr Cell operator-(const Cell& c, const Displacement& d) { return {c.x - d.dx, c.y - d.dy}; }
constexpr Displacement operator-(const Cell& a, const Cell& b) { return {a.x - b.x, a.y - b.y}; }

/// Inclusive axis-aligned cell rectangle [x1,x2] x [y1,y2].
struct Region {
    std::int64_t x1 = 0;
    std::int64_t y1 = 0;
    std::int64_t x2 = -1;
    std::int64_t y2 = -1;

    friend constexpr bool operator==(const Region&, const Region&) = default;

    [[nodiscard]] constexpr bool empty() const { return x1 > x2 || y1 > y2; }
    [[nodiscard]] constexpr bool contains(const Cell& c) const {
        return x1 <= c.x && c.x <= x2 && y1 <= c.y && c.y <= y2;
    }
    [[nodiscard]] constexpr bool contains(const Region& r) const {
        return x1 <= r.x1 && r.x2 <= x2 && y1 <= r.y1 && r.y2 <= y2;
    }
    [[nodiscard]] constexpr bool intersects(const Region& r) const {
        return !empty() && !r.empty() && x1 <= r.x2 && r.x1 <= x2 && y1 <= r.y2 && r.y1 <= y2;
    }
    [[nodiscard]] constexpr Region intersection(const Region& r) const {
        return {std::max(x1, r.x1), std::max(y1, r.y1), std::min(x2, r.x2), std::min(y2, r.y2)};
    }
    [[nodiscard]] constexpr Region shifted(const Displacement& d) const {
        return {x1 + d.dx, y1 + d.dy, x2 + d.dx, y2 + d.dy};
    }
};

/// Thrown when serialized input is malformed, truncated, or fails validation.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gract
