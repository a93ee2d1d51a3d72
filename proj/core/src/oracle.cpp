#include "gract/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gract/geometry.hpp"

namespace gract {

Oracle::Oracle(const TrajectorySet& data) : last_instant_(data.last_instant), grid_side_(data.grid_side) {
    timelines_.resize(data.objects.size());
    for (std::size_t o = 0; o < data.objects.size(); ++o) {
        const auto& fixes = data.objects[o];
        if (fixes.empty()) continue;
        Timeline& tl = timelines_[o];
        tl.first = fixes.front().t;
        tl.xy.assign(2 * (fixes.back().t - tl.first + 1), -1);
        for (const auto& f : fixes) {
            if (f.cell.x > std::numeric_limits<std::int32_t>::max() || f.cell.y > std::numeric_limits<std::int32_t>::max()) {
                throw std::out_of_range("Oracle: coordinate too large");
            }
            tl.xy[2 * (f.t - tl.first)] = static_cast<std::int32_t>(f.cell.x);
            tl.xy[2 * (f.t - tl.first) + 1] = static_cast<std::int32_t>(f.cell.y);
        }
    }
}

std::optional<Cell> Oracle::search_object(ObjectId o, Instant t) const {
    if (o >= timelines_.size()) return std::nullopt;
    const Timeline& tl = timelines_[o];
    if (t < tl.first || 2 * (t - tl.first) >= tl.xy.size()) return std::nullopt;
    const std::size_t i = 2 * (t - tl.first);
    if (tl.xy[i] < 0) return std::nullopt;
    return Cell{tl.xy[i], tl.xy[i + 1]};
}

std::vector<TimedCell> Oracle::search_trajectory(ObjectId o, Instant t_b, Instant t_e) const {
    std::vector<TimedCell> out;
    if (o >= timelines_.size() || t_b > t_e) return out;
    const Timeline& tl = timelines_[o];
    if (tl.xy.empty()) return out;
    const Instant last = tl.first + tl.xy.size() / 2 - 1;
    for (Instant t = std::max(t_b, tl.first); t <= std::min(t_e, last); ++t) {
        if (auto c = search_object(o, t)) out.push_back({t, *c});
    }
    return out;
}

std::vector<PlacedObject> Oracle::time_slice(const Region& r, Instant t) const {
    std::vector<PlacedObject> out;
    for (std::size_t o = 0; o < timelines_.size(); ++o) {
        const auto c = search_object(static_cast<ObjectId>(o), t);
        if (c && r.contains(*c)) out.push_back({static_cast<ObjectId>(o), *c});
    }
    return out;
}

std::vector<ObjectId> Oracle::time_interval(const Region& r, Instant t_b, Instant t_e) const {
    std::vector<ObjectId> out;
    for (std::size_t o = 0; o < timelines_.size(); ++o) {
        for (const auto& tc : search_trajectory(static_cast<ObjectId>(o), t_b, t_e)) {
            if (r.contains(tc.cell)) {
                out.push_back(static_cast<ObjectId>(o));
                break;
            }
        }
    }
    return out;
}

std::vector<Neighbor> Oracle::knn(std::size_t k, Cell q, Instant t) const {
    std::vector<Neighbor> all;
    for (std::size_t o = 0; o < timelines_.size(); ++o) {
        if (const auto c = search_object(static_cast<ObjectId>(o), t)) {
            const std::int64_t d2 = squared_distance(q, *c);
            all.push_back({static_cast<ObjectId>(o), d2, std::sqrt(static_cast<double>(d2))});
        }
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.squared_distance != b.squared_distance ? a.squared_distance < b.squared_distance : a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace gract
