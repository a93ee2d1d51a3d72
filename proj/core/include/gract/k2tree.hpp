#pragma once

// Static k^2-tree over a binary occupancy matrix.
//
// The matrix is padded to side k^height and split recursively into k x k
// blocks. Children of a node are ordered left to right, then top (north) to
// bottom (south). Internal levels are stored level by level in T and the
// last level in L. A 1 at 0-based position p of T has its k^2 children at
// rank_1(T, p+1) * k^2 in the concatenation T:L.

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "gract/succinct.hpp"
#include "gract/types.hpp"

namespace gract {

/// An occupied cell together with its 1-based ordinal among the 1s of L.
struct LeafCell {
    Cell cell;
    std::size_t leaf_rank = 0;

    friend bool operator==(const LeafCell&, const LeafCell&) = default;
};

class K2Tree;

/// Best-first traversal of the non-empty nodes of a K2Tree by distance to a
/// query point. Ties are broken by Z-order, then shallower nodes first.
class K2DistanceCursor {
public:
    struct Item {
        Region region;
        std::int64_t squared_distance = 0;
        unsigned depth = 0;         // 0 = root, height = single cell
        std::size_t leaf_rank = 0;  // set when depth == height
        [[nodiscard]] bool is_cell() const { return leaf_rank != 0; }
    };

    K2DistanceCursor(const K2Tree& tree, Cell query);

    /// Pops the closest pending node and makes its non-empty children pending.
    std::optional<Item> next();
    /// Distance of the next node without consuming it.
    [[nodiscard]] std::optional<std::int64_t> peek_squared_distance() const;

private:
    struct Entry {
        std::int64_t dist2;
        std::uint64_t zkey;
        unsigned depth;
        std::size_t pos;  // position of the node bit in T:L (unused for the root)
        std::int64_t x0, y0, size;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.dist2 != b.dist2) return a.dist2 > b.dist2;
            if (a.zkey != b.zkey) return a.zkey > b.zkey;
            return a.depth > b.depth;
        }
    };

    const K2Tree* tree_;
    Cell query_;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
};

class K2Tree {
public:
    K2Tree() = default;

    /// Builds over `points` (duplicates ignored). `extent` is padded up to the
    /// next power of k (at least k). Throws std::out_of_range for points
    /// outside [0, extent)^2.
    static K2Tree build(std::span<const Cell> points, std::uint64_t extent, unsigned k = 2);

    [[nodiscard]] unsigned k() const { return k_; }
    [[nodiscard]] std::uint64_t side() const { return side_; }
    [[nodiscard]] unsigned height() const { return height_; }
    [[nodiscard]] const BitVector& T() const { return t_; }
    [[nodiscard]] const BitVector& L() const { return l_; }
    [[nodiscard]] std::size_t leaf_count() const { return l_.count_ones(); }

    /// 1-based leaf rank of an occupied cell, or nullopt if empty.
    [[nodiscard]] std::optional<std::size_t> cell(const Cell& c) const;
    /// Occupied cells inside r (clipped to the extent), in leaf order.
    [[nodiscard]] std::vector<LeafCell> range(const Region& r) const;
    /// Cell of the given 1-based leaf rank, via upward traversal.
    [[nodiscard]] Cell locate(std::size_t leaf_rank) const;

    [[nodiscard]] K2DistanceCursor nodes_by_distance(const Cell& q) const { return {*this, q}; }

    [[nodiscard]] std::size_t size_in_bytes() const { return t_.size_in_bytes() + l_.size_in_bytes() + 9; }

    void serialize(ByteWriter& out) const;
    static K2Tree deserialize(ByteReader& in);

    friend bool operator==(const K2Tree& a, const K2Tree& b) {
        return a.k_ == b.k_ && a.side_ == b.side_ && a.t_ == b.t_ && a.l_ == b.l_;
    }

private:
    friend class K2DistanceCursor;

    [[nodiscard]] bool bit(std::size_t pos) const { return pos < t_.size() ? t_[pos] : l_[pos - t_.size()]; }
    [[nodiscard]] std::size_t children_of(std::size_t pos) const { return t_.rank1(pos + 1) * kk_; }
    [[nodiscard]] std::size_t leaf_rank_at(std::size_t pos) const { return l_.rank1(pos - t_.size() + 1); }
    [[nodiscard]] unsigned digit_of(const Cell& c, std::int64_t sub) const;
    void child_origin(unsigned digit, std::int64_t x0, std::int64_t y0, std::int64_t sub, std::int64_t& cx,
                      std::int64_t& cy) const;
    void range_rec(const Region& r, std::size_t base, unsigned depth, std::int64_t x0, std::int64_t y0,
                   std::int64_t size, std::vector<LeafCell>& out) const;

    unsigned k_ = 2;
    unsigned kk_ = 4;
    std::uint64_t side_ = 0;
    unsigned height_ = 0;
    BitVector t_;
    BitVector l_;
};

}  // namespace gract
