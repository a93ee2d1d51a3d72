#include "gract/k2tree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gract/geometry.hpp"

namespace gract {

namespace {

constexpr std::uint64_t kMaxSide = std::uint64_t{1} << 31;

}  // namespace

unsigned K2Tree::digit_of(const Cell& c, std::int64_t sub) const {
    const auto k = static_cast<std::int64_t>(k_);
    const auto col = static_cast<unsigned>((c.x / sub) % k);
    const auto row_from_top = static_cast<unsigned>(k - 1 - (c.y / sub) % k);
    return row_from_top * k_ + col;
}

void K2Tree::child_origin(unsigned digit, std::int64_t x0, std::int64_t y0, std::int64_t sub, std::int64_t& cx,
                          std::int64_t& cy) const {
    const unsigned row_from_top = digit / k_;
    const unsigned col = digit % k_;
    cx = x0 + static_cast<std::int64_t>(col) * sub;
    cy = y0 + static_cast<std::int64_t>(k_ - 1 - row_from_top) * sub;
}

K2Tree K2Tree::build(std::span<const Cell> points, std::uint64_t extent, unsigned k) {
    if (k < 2) throw std::invalid_argument("K2Tree: arity must be >= 2");
    K2Tree t;
    t.k_ = k;
    t.kk_ = k * k;
    t.side_ = k;
    t.height_ = 1;
    while (t.side_ < extent) {
        t.side_ *= k;
        ++t.height_;
    }
    if (t.side_ > kMaxSide) throw std::out_of_range("K2Tree: extent too large");

    const auto side = static_cast<std::int64_t>(t.side_);
    // Leaf keys in child-digit order; sorting them gives Z-order.
    std::vector<std::vector<unsigned>> paths;
    paths.reserve(points.size());
    for (const auto& p : points) {
        if (p.x < 0 || p.y < 0 || p.x >= static_cast<std::int64_t>(extent) || p.y >= static_cast<std::int64_t>(extent)) {
            throw std::out_of_range("K2Tree: point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                    ") outside extent");
        }
        std::vector<unsigned> path(t.height_);
        std::int64_t sub = side;
        for (unsigned l = 0; l < t.height_; ++l) {
            sub /= k;
            path[l] = t.digit_of(p, sub);
        }
        paths.push_back(std::move(path));
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    BitVectorBuilder tb;
    BitVectorBuilder lb;
    for (unsigned level = 0; level < t.height_; ++level) {
        BitVectorBuilder& out = level + 1 < t.height_ ? tb : lb;
        if (paths.empty()) {
            if (level == 0) for (unsigned c = 0; c < t.kk_; ++c) out.push_back(false);
            continue;
        }
        std::size_t i = 0;
        while (i < paths.size()) {
            // One group per distinct parent prefix paths[i][0..level).
            std::vector<bool> children(t.kk_, false);
            std::size_t j = i;
            while (j < paths.size() && std::equal(paths[j].begin(), paths[j].begin() + level, paths[i].begin())) {
                children[paths[j][level]] = true;
                ++j;
            }
            for (bool b : children) out.push_back(b);
            i = j;
        }
    }
    t.t_ = std::move(tb).build();
    t.l_ = std::move(lb).build();
    return t;
}

std::optional<std::size_t> K2Tree::cell(const Cell& c) const {
    const auto side = static_cast<std::int64_t>(side_);
    if (c.x < 0 || c.y < 0 || c.x >= side || c.y >= side) {
        throw std::out_of_range("K2Tree::cell: outside extent");
    }
    std::size_t base = 0;
    std::int64_t sub = side;
    for (unsigned level = 0; level < height_; ++level) {
        sub /= k_;
        const std::size_t pos = base + digit_of(c, sub);
        if (!bit(pos)) return std::nullopt;
        if (level + 1 == height_) return leaf_rank_at(pos);
        base = children_of(pos);
    }
    return std::nullopt;
}

void K2Tree::range_rec(const Region& r, std::size_t base, unsigned depth, std::int64_t x0, std::int64_t y0,
                       std::int64_t size, std::vector<LeafCell>& out) const {
    const std::int64_t sub = size / k_;
    for (unsigned d = 0; d < kk_; ++d) {
        const std::size_t pos = base + d;
        if (!bit(pos)) continue;
        std::int64_t cx, cy;
        child_origin(d, x0, y0, sub, cx, cy);
        const Region child{cx, cy, cx + sub - 1, cy + sub - 1};
        if (!child.intersects(r)) continue;
        if (depth + 1 == height_) {
            out.push_back({{cx, cy}, leaf_rank_at(pos)});
        } else {
            range_rec(r, children_of(pos), depth + 1, cx, cy, sub, out);
        }
    }
}

std::vector<LeafCell> K2Tree::range(const Region& r) const {
    std::vector<LeafCell> out;
    const auto side = static_cast<std::int64_t>(side_);
    const Region clipped = r.intersection({0, 0, side - 1, side - 1});
    if (height_ == 0 || clipped.empty()) return out;
    range_rec(clipped, 0, 0, 0, 0, side, out);
    return out;
}

Cell K2Tree::locate(std::size_t leaf_rank) const {
    if (leaf_rank == 0 || leaf_rank > leaf_count()) {
        throw std::out_of_range("K2Tree::locate: leaf rank " + std::to_string(leaf_rank));
    }
    std::size_t pos = t_.size() + l_.select1(leaf_rank) - 1;
    std::vector<unsigned> digits;
    digits.reserve(height_);
    while (true) {
        digits.push_back(static_cast<unsigned>(pos % kk_));
        const std::size_t block = pos / kk_;
        if (block == 0) break;
        pos = t_.select1(block) - 1;
    }
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t sub = static_cast<std::int64_t>(side_);
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        sub /= k_;
        child_origin(*it, x, y, sub, x, y);
    }
    return {x, y};
}

void K2Tree::serialize(ByteWriter& out) const {
    out.u8(static_cast<std::uint8_t>(k_));
    out.u64(side_);
    t_.serialize(out);
    l_.serialize(out);
}

K2Tree K2Tree::deserialize(ByteReader& in) {
    K2Tree t;
    t.k_ = in.u8();
    if (t.k_ < 2) throw FormatError("k2-tree arity below 2");
    t.kk_ = t.k_ * t.k_;
    t.side_ = in.u64();
    if (t.side_ > kMaxSide) throw FormatError("k2-tree side out of range");
    std::uint64_t s = t.k_;
    t.height_ = 1;
    while (s < t.side_) {
        s *= t.k_;
        ++t.height_;
    }
    if (s != t.side_) throw FormatError("k2-tree side is not a power of k");
    t.t_ = BitVector::deserialize(in);
    t.l_ = BitVector::deserialize(in);
    if ((t.t_.count_ones() + 1) * t.kk_ != t.t_.size() + t.l_.size()) {
        throw FormatError("k2-tree node counts inconsistent");
    }
    if ((t.height_ == 1) != t.t_.empty()) throw FormatError("k2-tree height inconsistent with bitmaps");
    return t;
}

// ---------------------------------------------------------------- distance cursor

K2DistanceCursor::K2DistanceCursor(const K2Tree& tree, Cell query) : tree_(&tree), query_(query) {
    if (tree.height_ == 0) return;
    const auto side = static_cast<std::int64_t>(tree.side_);
    heap_.push({squared_distance(query, Region{0, 0, side - 1, side - 1}), 0, 0, 0, 0, 0, side});
}

std::optional<std::int64_t> K2DistanceCursor::peek_squared_distance() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().dist2;
}

std::optional<K2DistanceCursor::Item> K2DistanceCursor::next() {
    if (heap_.empty()) return std::nullopt;
    const Entry e = heap_.top();
    heap_.pop();
    Item item{{e.x0, e.y0, e.x0 + e.size - 1, e.y0 + e.size - 1}, e.dist2, e.depth, 0};
    const K2Tree& t = *tree_;
    if (e.depth == t.height_) {
        item.leaf_rank = t.leaf_rank_at(e.pos);
        return item;
    }
    const std::size_t base = e.depth == 0 ? 0 : t.children_of(e.pos);
    const std::int64_t sub = e.size / t.k_;
    // Weight of one child digit at this depth in the padded Z-order key.
    std::uint64_t weight = 1;
    for (unsigned l = e.depth + 1; l < t.height_; ++l) weight *= t.kk_;
    for (unsigned d = 0; d < t.kk_; ++d) {
        const std::size_t pos = base + d;
        if (!t.bit(pos)) continue;
        std::int64_t cx, cy;
        t.child_origin(d, e.x0, e.y0, sub, cx, cy);
        const Region child{cx, cy, cx + sub - 1, cy + sub - 1};
        heap_.push({squared_distance(query_, child), e.zkey + d * weight, e.depth + 1, pos, cx, cy, sub});
    }
    return item;
}

}  // namespace gract
