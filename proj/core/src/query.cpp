#include "gract/query.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gract {

std::string to_string(QueryType type) {
    switch (type) {
        case QueryType::Object:
            return "object";
        case QueryType::Trajectory:
            return "trajectory";
        case QueryType::TimeSlice:
            return "time-slice";
        case QueryType::TimeInterval:
            return "time-interval";
        case QueryType::Knn:
            return "knn";
    }
    return "?";
}

std::optional<QueryType> parse_query_type(const std::string& name) {
    for (auto t : kAllQueryTypes) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

std::string Query::to_flags() const {
    std::ostringstream s;
    s << "--type " << to_string(type);
    switch (type) {
        case QueryType::Object:
            s << " --id " << id << " --t " << t;
            break;
        case QueryType::Trajectory:
            s << " --id " << id << " --t-begin " << t_begin << " --t-end " << t_end;
            break;
        case QueryType::TimeSlice:
            s << " --x1 " << region.x1 << " --y1 " << region.y1 << " --x2 " << region.x2 << " --y2 " << region.y2
              << " --t " << t;
            break;
        case QueryType::TimeInterval:
            s << " --x1 " << region.x1 << " --y1 " << region.y1 << " --x2 " << region.x2 << " --y2 " << region.y2
              << " --t-begin " << t_begin << " --t-end " << t_end;
            break;
        case QueryType::Knn:
            s << " --px " << point.x << " --py " << point.y << " --t " << t << " --k-nn " << k;
            break;
    }
    return s.str();
}

std::size_t QueryAnswer::size() const {
    switch (type) {
        case QueryType::Object:
            return position ? 1 : 0;
        case QueryType::Trajectory:
            return trajectory.size();
        case QueryType::TimeSlice:
            return placed.size();
        case QueryType::TimeInterval:
            return ids.size();
        case QueryType::Knn:
            return neighbors.size();
    }
    return 0;
}

std::string QueryAnswer::to_string() const {
    std::ostringstream s;
    auto cell = [&](const Cell& c) { s << "(" << c.x << "," << c.y << ")"; };
    switch (type) {
        case QueryType::Object:
            if (position) {
                cell(*position);
            } else {
                s << "absent";
            }
            break;
        case QueryType::Trajectory:
            for (const auto& tc : trajectory) {
                s << tc.t << ":";
                cell(tc.cell);
                s << " ";
            }
            break;
        case QueryType::TimeSlice:
            for (const auto& p : placed) {
                s << p.id << "@";
                cell(p.cell);
                s << " ";
            }
            break;
        case QueryType::TimeInterval:
            for (auto id : ids) s << id << " ";
            break;
        case QueryType::Knn:
            s.precision(12);
            for (const auto& n : neighbors) s << n.id << ":" << n.distance << " ";
            break;
    }
    std::string out = s.str();
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return "[" + out + "]";
}

QueryAnswer run_query(const Index& index, const Query& q, const QueryOptions& opt, QueryCounters* counters) {
    QueryAnswer a;
    a.type = q.type;
    switch (q.type) {
        case QueryType::Object:
            a.position = index.search_object(q.id, q.t, opt, counters);
            break;
        case QueryType::Trajectory:
            a.trajectory = index.search_trajectory(q.id, q.t_begin, q.t_end, counters);
            break;
        case QueryType::TimeSlice:
            a.placed = index.time_slice(q.region, q.t, opt, counters);
            break;
        case QueryType::TimeInterval:
            a.ids = index.time_interval(q.region, q.t_begin, q.t_end, opt, counters);
            break;
        case QueryType::Knn:
            a.neighbors = index.knn(q.k, q.point, q.t, opt, counters);
            break;
    }
    return a;
}

QueryAnswer run_query(const Oracle& oracle, const Query& q) {
    QueryAnswer a;
    a.type = q.type;
    switch (q.type) {
        case QueryType::Object:
            a.position = oracle.search_object(q.id, q.t);
            break;
        case QueryType::Trajectory:
            a.trajectory = oracle.search_trajectory(q.id, q.t_begin, q.t_end);
            break;
        case QueryType::TimeSlice:
            a.placed = oracle.time_slice(q.region, q.t);
            break;
        case QueryType::TimeInterval:
            a.ids = oracle.time_interval(q.region, q.t_begin, q.t_end);
            break;
        case QueryType::Knn:
            a.neighbors = oracle.knn(q.k, q.point, q.t);
            break;
    }
    return a;
}

bool same_answer(const QueryAnswer& a, const QueryAnswer& b) {
    if (a.type != b.type) return false;
    switch (a.type) {
        case QueryType::Object:
            return a.position == b.position;
        case QueryType::Trajectory:
            return a.trajectory == b.trajectory;
        case QueryType::TimeSlice:
            return a.placed == b.placed;
        case QueryType::TimeInterval:
            return a.ids == b.ids;
        case QueryType::Knn:
            if (a.neighbors.size() != b.neighbors.size()) return false;
            for (std::size_t i = 0; i < a.neighbors.size(); ++i) {
                if (a.neighbors[i].id != b.neighbors[i].id ||
                    std::abs(a.neighbors[i].distance - b.neighbors[i].distance) > 1e-9) {
                    return false;
                }
            }
            return true;
    }
    return false;
}

Query random_query(QueryType type, std::size_t objects, Instant last_instant, std::uint64_t grid_side,
                   std::mt19937_64& rng, Instant max_span) {
    auto uniform = [&](std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
    };
    const std::uint64_t side = std::max<std::uint64_t>(grid_side, 1);
    auto region = [&] {
        const std::uint64_t w = uniform(0, std::max<std::uint64_t>(side / 4, 1) - 1);
        const std::uint64_t h = uniform(0, std::max<std::uint64_t>(side / 4, 1) - 1);
        const std::uint64_t x = uniform(0, side - 1);
        const std::uint64_t y = uniform(0, side - 1);
        return Region{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y),
                      static_cast<std::int64_t>(std::min(x + w, side - 1)),
                      static_cast<std::int64_t>(std::min(y + h, side - 1))};
    };
    auto interval = [&](Query& q) {
        q.t_begin = uniform(0, last_instant);
        q.t_end = std::min(last_instant, q.t_begin + uniform(0, 2 * max_span));
    };

    Query q;
    q.type = type;
    switch (type) {
        case QueryType::Object:
            q.id = static_cast<ObjectId>(uniform(0, std::max<std::size_t>(objects, 1) - 1));
            q.t = uniform(0, last_instant);
            break;
        case QueryType::Trajectory:
            q.id = static_cast<ObjectId>(uniform(0, std::max<std::size_t>(objects, 1) - 1));
            interval(q);
            break;
        case QueryType::TimeSlice:
            q.region = region();
            q.t = uniform(0, last_instant);
            break;
        case QueryType::TimeInterval:
            q.region = region();
            interval(q);
            break;
        case QueryType::Knn:
            q.point = {static_cast<std::int64_t>(uniform(0, side - 1)), static_cast<std::int64_t>(uniform(0, side - 1))};
            q.t = uniform(0, last_instant);
            q.k = uniform(1, 50);
            break;
    }
    return q;
}

}  // namespace gract
