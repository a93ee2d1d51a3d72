#pragma once

// Absolute positions of all reported objects at one snapshot instant.
//
// The occupied cells form a k^2-tree. Present objects are listed grouped by
// leaf in leaf order; perm maps list positions to local ranks (rank of the id
// among present ids) and Q marks group boundaries: 1 for every member of a
// cell group except the last, which gets 0.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gract/k2tree.hpp"
#include "gract/succinct.hpp"
#include "gract/types.hpp"

namespace gract {

struct PlacedObject {
    ObjectId id = 0;
    Cell cell;

    friend bool operator==(const PlacedObject&, const PlacedObject&) = default;
};

class Snapshot;

/// Present objects in non-decreasing distance to a query cell. Cells with
/// equal distance come in leaf order, objects within a cell in group order.
class SnapshotDistanceStream {
public:
    struct Item {
        ObjectId id;
        Cell cell;
        std::int64_t squared_distance;
    };

    SnapshotDistanceStream(const Snapshot& snapshot, Cell query);

    std::optional<Item> next();
    /// Lower bound on the squared distance of anything still to come.
    [[nodiscard]] std::optional<std::int64_t> peek_squared_distance() const;

private:
    void fill();

    const Snapshot* snapshot_;
    K2DistanceCursor cursor_;
    std::vector<Item> buffer_;
    std::size_t next_ = 0;
};

class Snapshot {
public:
    Snapshot() = default;

    /// Throws std::invalid_argument on a duplicate object or an id outside
    /// [0, object_count); std::out_of_range on a cell outside the grid.
    static Snapshot build(Instant time, std::span<const PlacedObject> objects, std::size_t object_count,
                          std::uint64_t extent, unsigned k, std::vector<ObjectId> appear, std::vector<ObjectId> disappear,
                          unsigned perm_sample_rate = Permutation::kDefaultSampleRate);

    [[nodiscard]] Instant time() const { return time_; }
    [[nodiscard]] const K2Tree& tree() const { return tree_; }
    [[nodiscard]] const Permutation& perm() const { return perm_; }
    [[nodiscard]] const BitVector& groups() const { return q_; }
    [[nodiscard]] const BitVector& presence() const { return present_; }
    [[nodiscard]] std::size_t object_count() const { return present_.size(); }
    [[nodiscard]] std::size_t present_count() const { return perm_.size(); }

    [[nodiscard]] bool contains(ObjectId o) const { return o < present_.size() && present_[o]; }
    [[nodiscard]] std::optional<Cell> find_object(ObjectId o) const;
    /// Ids in the given cell, in group order.
    [[nodiscard]] std::vector<ObjectId> objects_in_cell(const Cell& c) const;
    /// Ids stored under the leaf with the given 1-based rank.
    [[nodiscard]] std::vector<ObjectId> objects_in_leaf(std::size_t leaf_rank) const;
    [[nodiscard]] std::vector<PlacedObject> objects_in_region(const Region& r) const;
    [[nodiscard]] SnapshotDistanceStream candidates_by_distance(const Cell& q) const { return {*this, q}; }

    /// Objects absent here whose following log starts with an absolute appearance.
    [[nodiscard]] const std::vector<ObjectId>& appear() const { return appear_; }
    /// Objects absent here whose preceding log ends with a disappearance.
    [[nodiscard]] const std::vector<ObjectId>& disappear() const { return disappear_; }
    [[nodiscard]] bool in_appear(ObjectId o) const;
    [[nodiscard]] bool in_disappear(ObjectId o) const;

    [[nodiscard]] std::size_t size_in_bytes() const;

    void serialize(ByteWriter& out) const;
    static Snapshot deserialize(ByteReader& in);

    /// Fault injection for verification tooling: swaps two perm entries so two
    /// objects trade places.
    void swap_perm_entries(std::size_t i, std::size_t j);

    friend bool operator==(const Snapshot&, const Snapshot&) = default;

private:
    [[nodiscard]] ObjectId id_at(std::size_t list_pos) const;

    Instant time_ = 0;
    K2Tree tree_;
    BitVector present_;
    Permutation perm_;
    BitVector q_;
    std::vector<ObjectId> appear_;
    std::vector<ObjectId> disappear_;
};

}  // namespace gract
