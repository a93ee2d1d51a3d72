#include "gract/snapshot.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gract {

namespace {

IntVector pack_ids(const std::vector<ObjectId>& ids) {
    std::vector<std::uint64_t> v(ids.begin(), ids.end());
    return IntVector::from_values(v);
}

std::vector<ObjectId> unpack_ids(const IntVector& packed, std::size_t object_count) {
    std::vector<ObjectId> out(packed.size());
    for (std::size_t i = 0; i < packed.size(); ++i) {
        const std::uint64_t v = packed[i];
        if (v >= object_count || (i > 0 && v <= out[i - 1])) throw FormatError("snapshot: bad id list");
        out[i] = static_cast<ObjectId>(v);
    }
    return out;
}

}  // namespace

Snapshot Snapshot::build(Instant time, std::span<const PlacedObject> objects, std::size_t object_count,
                         std::uint64_t extent, unsigned k, std::vector<ObjectId> appear,
                         std::vector<ObjectId> disappear, unsigned perm_sample_rate) {
    Snapshot s;
    s.time_ = time;
    std::vector<bool> present(object_count, false);
    std::vector<Cell> cells;
    cells.reserve(objects.size());
    for (const auto& p : objects) {
        if (p.id >= object_count) throw std::invalid_argument("Snapshot: object id " + std::to_string(p.id) + " out of range");
        if (present[p.id]) throw std::invalid_argument("Snapshot: duplicate object " + std::to_string(p.id));
        present[p.id] = true;
        cells.push_back(p.cell);
    }
    s.tree_ = K2Tree::build(cells, extent, k);
    s.present_ = BitVector(present);

    struct Entry {
        std::size_t leaf;
        ObjectId id;
    };
    std::vector<Entry> entries;
    entries.reserve(objects.size());
    for (const auto& p : objects) entries.push_back({*s.tree_.cell(p.cell), p.id});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.leaf != b.leaf ? a.leaf < b.leaf : a.id < b.id; });

    std::vector<std::uint64_t> forward(entries.size());
    BitVectorBuilder q(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        forward[i] = s.present_.rank1(entries[i].id + std::size_t{1});
        q.push_back(i + 1 < entries.size() && entries[i + 1].leaf == entries[i].leaf);
    }
    s.perm_ = Permutation(forward, perm_sample_rate);
    s.q_ = std::move(q).build();

    std::sort(appear.begin(), appear.end());
    appear.erase(std::unique(appear.begin(), appear.end()), appear.end());
    std::sort(disappear.begin(), disappear.end());
    disappear.erase(std::unique(disappear.begin(), disappear.end()), disappear.end());
    for (auto o : appear) {
        if (o >= object_count || present[o]) throw std::invalid_argument("Snapshot: appearing object must be absent");
    }
    for (auto o : disappear) {
        if (o >= object_count || present[o]) throw std::invalid_argument("Snapshot: disappeared object must be absent");
    }
    s.appear_ = std::move(appear);
    s.disappear_ = std::move(disappear);
    return s;
}

ObjectId Snapshot::id_at(std::size_t list_pos) const {
    return static_cast<ObjectId>(present_.select1(perm_.pi(list_pos)) - 1);
}

std::optional<Cell> Snapshot::find_object(ObjectId o) const {
    if (!contains(o)) return std::nullopt;
    const std::size_t local = present_.rank1(o + std::size_t{1});
    const std::size_t pos = perm_.pi_inv(local);
    const std::size_t leaf = q_.rank0(pos - 1) + 1;
    return tree_.locate(leaf);
}

std::vector<ObjectId> Snapshot::objects_in_leaf(std::size_t leaf_rank) const {
    const std::size_t first = leaf_rank == 1 ? 1 : q_.select0(leaf_rank - 1) + 1;
    const std::size_t last = q_.select0(leaf_rank);
    std::vector<ObjectId> out;
    out.reserve(last - first + 1);
    for (std::size_t p = first; p <= last; ++p) out.push_back(id_at(p));
    return out;
}

std::vector<ObjectId> Snapshot::objects_in_cell(const Cell& c) const {
    const auto side = static_cast<std::int64_t>(tree_.side());
    if (c.x < 0 || c.y < 0 || c.x >= side || c.y >= side) return {};
    const auto leaf = tree_.cell(c);
    if (!leaf) return {};
    return objects_in_leaf(*leaf);
}

std::vector<PlacedObject> Snapshot::objects_in_region(const Region& r) const {
    std::vector<PlacedObject> out;
    for (const auto& lc : tree_.range(r)) {
        for (auto id : objects_in_leaf(lc.leaf_rank)) out.push_back({id, lc.cell});
    }
    return out;
}

bool Snapshot::in_appear(ObjectId o) const { return std::binary_search(appear_.begin(), appear_.end(), o); }

bool Snapshot::in_disappear(ObjectId o) const {
    return std::binary_search(disappear_.begin(), disappear_.end(), o);
}

std::size_t Snapshot::size_in_bytes() const {
    return 8 + tree_.size_in_bytes() + present_.size_in_bytes() + perm_.size_in_bytes() + q_.size_in_bytes() +
           pack_ids(appear_).size_in_bytes() + pack_ids(disappear_).size_in_bytes();
}

void Snapshot::serialize(ByteWriter& out) const {
    out.u64(time_);
    tree_.serialize(out);
    present_.serialize(out);
    perm_.serialize(out);
    q_.serialize(out);
    pack_ids(appear_).serialize(out);
    pack_ids(disappear_).serialize(out);
}

Snapshot Snapshot::deserialize(ByteReader& in) {
    Snapshot s;
    s.time_ = in.u64();
    s.tree_ = K2Tree::deserialize(in);
    s.present_ = BitVector::deserialize(in);
    s.perm_ = Permutation::deserialize(in);
    s.q_ = BitVector::deserialize(in);
    const std::size_t n = s.present_.size();
    s.appear_ = unpack_ids(IntVector::deserialize(in), n);
    s.disappear_ = unpack_ids(IntVector::deserialize(in), n);
    if (s.perm_.size() != s.present_.count_ones() || s.q_.size() != s.perm_.size() ||
        s.q_.rank0(s.q_.size()) != s.tree_.leaf_count()) {
        throw FormatError("snapshot: perm, groups and tree disagree");
    }
    if (!s.q_.empty() && s.q_[s.q_.size() - 1]) throw FormatError("snapshot: unterminated cell group");
    return s;
}

void Snapshot::swap_perm_entries(std::size_t i, std::size_t j) {
    std::vector<std::uint64_t> forward(perm_.size());
    for (std::size_t p = 0; p < forward.size(); ++p) forward[p] = perm_.pi(p + 1);
    std::swap(forward.at(i), forward.at(j));
    perm_ = Permutation(forward, perm_.sample_rate());
}

// ---------------------------------------------------------------- distance stream

SnapshotDistanceStream::SnapshotDistanceStream(const Snapshot& snapshot, Cell query)
    : snapshot_(&snapshot), cursor_(snapshot.tree().nodes_by_distance(query)) {}

void SnapshotDistanceStream::fill() {
    while (next_ == buffer_.size()) {
        const auto item = cursor_.next();
        if (!item) return;
        if (!item->is_cell()) continue;
        buffer_.clear();
        next_ = 0;
        const Cell c{item->region.x1, item->region.y1};
        for (auto id : snapshot_->objects_in_leaf(item->leaf_rank)) {
            buffer_.push_back({id, c, item->squared_distance});
        }
    }
}

std::optional<SnapshotDistanceStream::Item> SnapshotDistanceStream::next() {
    fill();
    if (next_ == buffer_.size()) return std::nullopt;
    return buffer_[next_++];
}

std::optional<std::int64_t> SnapshotDistanceStream::peek_squared_distance() const {
    if (next_ < buffer_.size()) return buffer_[next_].squared_distance;
    return cursor_.peek_squared_distance();
}

}  // namespace gract
