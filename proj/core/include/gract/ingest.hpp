#pragma once

// Raw GPS-like records to regular, discretized trajectories.
//
// Packed binary layout: the 4 bytes "TRJB", then one byte per column giving
// the width in bytes (1..8) of id, time, x and y, then fixed-width rows of
// little-endian unsigned integers.

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <span>
#include <vector>

#include "gract/trajectory.hpp"
#include "gract/types.hpp"

namespace gract {

struct RawRecord {
    std::uint64_t id = 0;
    double time = 0;
    double x = 0;
    double y = 0;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Thrown for malformed input; the message names the line or byte offset.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows "id,time,x,y". With has_header the first line is skipped. Blank
/// lines are ignored.
[[nodiscard]] std::vector<RawRecord> parse_csv(std::istream& in, bool has_header = false);

using ColumnWidths = std::array<std::uint8_t, 4>;

[[nodiscard]] std::vector<RawRecord> parse_binary(std::span<const std::uint8_t> bytes);
/// Coordinates and times are truncated to integers; throws if a value does
/// not fit its column.
[[nodiscard]] std::vector<std::uint8_t> write_binary(std::span<const RawRecord> records, ColumnWidths widths);

struct NormalizeParams {
    double cell_size = 1.0;  // projected units per cell
    double time_step = 1.0;  // seconds per instant
    double time_origin = 0.0;
    /// Projected units per second; records implying more are dropped.
    double speed_cap = std::numeric_limits<double>::infinity();
    /// Samples at least this many instants apart start a new segment.
    Instant gap_threshold = 15;
};

struct Segment {
    Instant start = 0;
    std::vector<Cell> cells;  // one per instant from start

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct NormalizedSeries {
    std::uint64_t id = 0;
    std::vector<Segment> segments;

    friend bool operator==(const NormalizedSeries&, const NormalizedSeries&) = default;
};

/// Sorts by time, drops speed-cap violations against the last kept record,
/// splits at large gaps, interpolates every instant in continuous coordinates
/// and floors to cells. Output is ordered by object id.
[[nodiscard]] std::vector<NormalizedSeries> normalize(std::vector<RawRecord> records, const NormalizeParams& params);

/// Object ids become indices directly; the grid and time extent are fitted.
/// Throws std::invalid_argument on negative cells or ids above 2^26.
[[nodiscard]] TrajectorySet to_trajectory_set(const std::vector<NormalizedSeries>& series);

/// Inverse view for round trips: one record per (object, instant) at the
/// centre of its cell.
[[nodiscard]] std::vector<RawRecord> to_records(const TrajectorySet& data, const NormalizeParams& params);

}  // namespace gract
