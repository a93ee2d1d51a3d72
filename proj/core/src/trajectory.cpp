#include "gract/trajectory.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gract {

std::size_t TrajectorySet::fix_count() const {
    std::size_t n = 0;
    for (const auto& fixes : objects) n += fixes.size();
    return n;
}

std::optional<Cell> TrajectorySet::position(ObjectId o, Instant t) const {
    if (o >= objects.size()) return std::nullopt;
    const auto& fixes = objects[o];
    const auto it = std::lower_bound(fixes.begin(), fixes.end(), t, [](const Fix& f, Instant v) { return f.t < v; });
    if (it == fixes.end() || it->t != t) return std::nullopt;
    return it->cell;
}

void TrajectorySet::validate() const {
    const auto side = static_cast<std::int64_t>(grid_side);
    for (std::size_t o = 0; o < objects.size(); ++o) {
        const auto& fixes = objects[o];
        for (std::size_t i = 0; i < fixes.size(); ++i) {
            const Fix& f = fixes[i];
            if (i > 0 && fixes[i - 1].t >= f.t) {
                throw std::invalid_argument("object " + std::to_string(o) + ": instants not strictly increasing at " +
                                            std::to_string(f.t));
            }
            if (f.t > last_instant) {
                throw std::invalid_argument("object " + std::to_string(o) + ": instant " + std::to_string(f.t) +
                                            " beyond last instant");
            }
            if (f.cell.x < 0 || f.cell.y < 0 || f.cell.x >= side || f.cell.y >= side) {
                throw std::invalid_argument("object " + std::to_string(o) + ": cell (" + std::to_string(f.cell.x) +
                                            "," + std::to_string(f.cell.y) + ") off grid");
            }
        }
    }
}

void TrajectorySet::fit_extent() {
    std::int64_t max_coord = 0;
    Instant last = 0;
    for (const auto& fixes : objects) {
        for (const auto& f : fixes) {
            max_coord = std::max({max_coord, f.cell.x, f.cell.y});
            last = std::max(last, f.t);
        }
    }
    grid_side = static_cast<std::uint64_t>(max_coord) + 1;
    last_instant = last;
}

}  // namespace gract
