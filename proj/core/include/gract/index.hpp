#pragma once

// The queryable index: snapshots every `period` instants, one compressed log
// per (portion, object) in between, and the shared rule dictionary.
//
// Time model: instants 0..last_instant. Snapshot j sits at j * period for
// every j * period <= last_instant. Portion h covers the instants
// (h * period, min((h + 1) * period, last_instant)]; a trailing partial
// portion has no following snapshot.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gract/log.hpp"
#include "gract/snapshot.hpp"
#include "gract/trajectory.hpp"
#include "gract/types.hpp"

namespace gract {

struct IndexParams {
    Instant period = 120;
    unsigned k = 2;
    unsigned perm_sample_rate = Permutation::kDefaultSampleRate;
};

/// Toggles for debugging and measurement. Answers never depend on them.
struct QueryOptions {
    bool mbr_pruning = true;
    bool er_pruning = true;
    /// Start from the nearest snapshot (else always the preceding one).
    bool nearest_snapshot = true;
};

struct QueryCounters {
    std::size_t symbols_examined = 0;
    std::size_t candidates = 0;

    QueryCounters& operator+=(const QueryCounters& o) {
        symbols_examined += o.symbols_examined;
        candidates += o.candidates;
        return *this;
    }
};

struct Neighbor {
    ObjectId id = 0;
    std::int64_t squared_distance = 0;
    double distance = 0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// One element of an extracted compressed trajectory: the absolute position
/// at a snapshot, or a log symbol with the walk state around it.
struct TrajectoryElement {
    enum class Kind : std::uint8_t { SnapshotPosition, Movement, Event };
    Kind kind = Kind::Movement;
    Symbol symbol;
    WalkState before;
    WalkState after;
    /// Event argument D (absolute instant for AA/D, gap length for RM/RNM).
    std::uint64_t event_value = 0;

    [[nodiscard]] std::string to_string(const RuleDictionary& dict) const;
};

struct IndexStats {
    std::size_t objects = 0;
    std::size_t snapshots = 0;
    std::size_t portions = 0;
    Instant period = 0;
    Instant last_instant = 0;
    std::uint64_t grid_side = 0;
    std::uint64_t max_speed = 0;
    std::size_t snapshot_bytes = 0;
    std::size_t log_bytes = 0;         // symbol streams, offsets and event arrays
    std::size_t dictionary_bytes = 0;
    std::size_t event_bytes = 0;       // part of log_bytes
    std::size_t total_bytes = 0;       // serialized file size
    std::size_t raw_symbols = 0;       // one per represented instant in the logs
    std::size_t compressed_symbols = 0;
    std::size_t events = 0;
    std::size_t rules = 0;
    unsigned grammar_depth = 0;
    /// (log_bytes + dictionary_bytes) / raw_symbols, the 1-byte-per-symbol baseline.
    double log_ratio = 0;
};

/// (x1,y1,x2,y2) grown by max_speed * (t_e - t_b) on every side and clamped
/// to [0, grid_side).
[[nodiscard]] Region expanded_region(const Region& r, Instant t_b, Instant t_e, std::uint64_t max_speed,
                                     std::uint64_t grid_side);

/// Smallest integer m with m * dt >= |displacement| over all consecutive
/// fixes of all objects, and at least 1.
[[nodiscard]] std::uint64_t compute_max_speed(const TrajectorySet& data);

class Index {
public:
    static constexpr std::uint16_t kFormatVersion = 1;

    Index() = default;
    static Index build(const TrajectorySet& data, const IndexParams& params = {});

    [[nodiscard]] const IndexParams& params() const { return params_; }
    [[nodiscard]] std::size_t object_count() const { return objects_; }
    [[nodiscard]] Instant last_instant() const { return last_instant_; }
    [[nodiscard]] std::uint64_t grid_side() const { return grid_side_; }
    [[nodiscard]] std::uint64_t max_speed() const { return max_speed_; }
    [[nodiscard]] std::size_t snapshot_count() const { return snapshots_.size(); }
    [[nodiscard]] std::size_t portion_count() const { return logs_.portions(); }
    [[nodiscard]] const Snapshot& snapshot(std::size_t j) const { return snapshots_.at(j); }
    [[nodiscard]] const LogStore& logs() const { return logs_; }
    [[nodiscard]] const RuleDictionary& dictionary() const { return logs_.dictionary(); }

    /// Compressed trajectory of o over [t_b, t_e]: boundary rules whole.
    [[nodiscard]] std::vector<TrajectoryElement> ct(ObjectId o, Instant t_b, Instant t_e) const;

    [[nodiscard]] std::optional<Cell> search_object(ObjectId o, Instant t, const QueryOptions& opt = {},
                                                    QueryCounters* counters = nullptr) const;
    [[nodiscard]] std::vector<TimedCell> search_trajectory(ObjectId o, Instant t_b, Instant t_e,
                                                           QueryCounters* counters = nullptr) const;
    /// Objects inside r at t, ordered by id.
    [[nodiscard]] std::vector<PlacedObject> time_slice(const Region& r, Instant t, const QueryOptions& opt = {},
                                                       QueryCounters* counters = nullptr) const;
    /// Objects inside r at some instant of [t_b, t_e], ordered by id.
    [[nodiscard]] std::vector<ObjectId> time_interval(const Region& r, Instant t_b, Instant t_e,
                                                      const QueryOptions& opt = {},
                                                      QueryCounters* counters = nullptr) const;
    /// The k objects nearest to q at t, ordered by (distance, id).
    [[nodiscard]] std::vector<Neighbor> knn(std::size_t k, Cell q, Instant t, const QueryOptions& opt = {},
                                            QueryCounters* counters = nullptr) const;

    /// Every object's full trajectory, decoded from the index.
    [[nodiscard]] TrajectorySet reconstruct() const;

    [[nodiscard]] IndexStats stats() const;

    [[nodiscard]] std::vector<std::uint8_t> serialize() const;
    static Index deserialize(std::span<const std::uint8_t> bytes);
    void save(const std::filesystem::path& path) const;
    static Index load(const std::filesystem::path& path);

    /// Fault injection for verification tooling: makes two objects of the
    /// first snapshot trade places. Returns false if it has fewer than two.
    bool inject_snapshot_fault();

private:
    [[nodiscard]] std::size_t pick_snapshot(Instant t, bool nearest) const;
    [[nodiscard]] Instant portion_end(std::size_t h) const;
    [[nodiscard]] WalkState snapshot_state(std::size_t j, ObjectId o) const;
    [[nodiscard]] bool present_at(std::size_t h, ObjectId o, Instant t, WalkState start,
                                  QueryCounters* counters) const;
    [[nodiscard]] Region grid() const;

    IndexParams params_;
    std::size_t objects_ = 0;
    Instant last_instant_ = 0;
    std::uint64_t grid_side_ = 0;
    std::uint64_t max_speed_ = 1;
    std::vector<Snapshot> snapshots_;
    LogStore logs_;
};

}  // namespace gract
