#pragma once

// Query descriptors that can run against either the index or the oracle,
// plus answer comparison and random workload generation.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gract/index.hpp"
#include "gract/oracle.hpp"

namespace gract {

enum class QueryType : std::uint8_t { Object, Trajectory, TimeSlice, TimeInterval, Knn };

inline constexpr QueryType kAllQueryTypes[] = {QueryType::Object, QueryType::Trajectory, QueryType::TimeSlice,
                                               QueryType::TimeInterval, QueryType::Knn};

[[nodiscard]] std::string to_string(QueryType type);
/// Accepts object, trajectory, time-slice, time-interval, knn.
[[nodiscard]] std::optional<QueryType> parse_query_type(const std::string& name);

struct Query {
    QueryType type = QueryType::Object;
    ObjectId id = 0;
    Instant t = 0;        // object, time-slice, knn
    Instant t_begin = 0;  // trajectory, time-interval
    Instant t_end = 0;
    Region region;        // time-slice, time-interval
    Cell point;           // knn
    std::size_t k = 1;    // knn

    /// The equivalent command-line flags.
    [[nodiscard]] std::string to_flags() const;
};

struct QueryAnswer {
    QueryType type = QueryType::Object;
    std::optional<Cell> position;
    std::vector<TimedCell> trajectory;
    std::vector<PlacedObject> placed;
    std::vector<ObjectId> ids;
    std::vector<Neighbor> neighbors;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::string to_string() const;
};

[[nodiscard]] QueryAnswer run_query(const Index& index, const Query& q, const QueryOptions& opt = {},
                                    QueryCounters* counters = nullptr);
[[nodiscard]] QueryAnswer run_query(const Oracle& oracle, const Query& q);

/// Exact equality, except knn distances which may differ by 1e-9.
[[nodiscard]] bool same_answer(const QueryAnswer& a, const QueryAnswer& b);

/// Random query of the given type over the dataset's extent. Regions span up
/// to a quarter of the grid side, intervals up to 2 * max_span instants and
/// knn asks for 1..50 neighbours.
[[nodiscard]] Query random_query(QueryType type, std::size_t objects, Instant last_instant, std::uint64_t grid_side,
                                 std::mt19937_64& rng, Instant max_span = 100);

}  // namespace gract
