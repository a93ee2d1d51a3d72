#include "gract/grammar.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace gract {

namespace {

constexpr std::uint64_t kSeparator = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kDeleted = kSeparator - 1;
constexpr std::int64_t kNone = -1;

struct PairKey {
    std::uint64_t a;
    std::uint64_t b;
    friend bool operator==(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept {
        std::uint64_t h = k.a * 0x9E3779B97F4A7C15ULL;
        h ^= k.b + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// Candidate positions of one pair. `bound` never underestimates the number of
// non-overlapping occurrences; `exact` says it equals it.
struct PairRecord {
    std::vector<std::size_t> positions;
    std::size_t bound = 0;
    bool exact = false;
    bool sorted = true;
};

struct HeapEntry {
    std::size_t count;
    std::uint64_t a;
    std::uint64_t b;
};

struct HeapLess {
    bool operator()(const HeapEntry& x, const HeapEntry& y) const {
        if (x.count != y.count) return x.count < y.count;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

class RePair {
public:
    RePair(const std::vector<std::vector<std::uint64_t>>& streams, std::uint64_t boundary) : boundary_(boundary) {
        for (std::size_t s = 0; s < streams.size(); ++s) {
            if (s > 0) sym_.push_back(kSeparator);
            for (auto v : streams[s]) {
                if (v >= boundary) {
                    throw std::invalid_argument("repair_compress: symbol " + std::to_string(v) +
                                                " not below terminal boundary");
                }
                sym_.push_back(v);
            }
        }
        const auto n = static_cast<std::int64_t>(sym_.size());
        prev_.resize(sym_.size());
        next_.resize(sym_.size());
        for (std::int64_t i = 0; i < n; ++i) {
            prev_[i] = i - 1;
            next_[i] = i + 1 < n ? i + 1 : kNone;
        }
        for (std::size_t i = 0; i + 1 < sym_.size(); ++i) {
            if (pairable(sym_[i]) && pairable(sym_[i + 1])) add_occurrence(i);
        }
        for (auto& [key, rec] : table_) {
            if (rec.bound >= 2) heap_.push({rec.bound, key.a, key.b});
        }
        dirty_.clear();
    }

    void run() {
        while (!heap_.empty()) {
            const HeapEntry top = heap_.top();
            if (top.count < 2) break;
            heap_.pop();
            auto it = table_.find({top.a, top.b});
            if (it == table_.end() || it->second.bound != top.count) continue;
            PairRecord& rec = it->second;
            if (!rec.exact) {
                compact({top.a, top.b}, rec);
                if (rec.bound >= 2) heap_.push({rec.bound, top.a, top.b});
                continue;
            }
            replace({top.a, top.b});
        }
    }

    RePairResult result(std::size_t stream_count) const {
        RePairResult out;
        out.terminal_boundary = boundary_;
        out.rules = rules_;
        out.streams.resize(stream_count);
        std::size_t s = 0;
        for (std::int64_t i = sym_.empty() ? kNone : 0; i != kNone; i = next_[i]) {
            if (sym_[i] == kSeparator) {
                ++s;
            } else {
                out.streams[s].push_back(sym_[i]);
            }
        }
        return out;
    }

private:
    static bool pairable(std::uint64_t v) { return v >= kEventSymbols && v < kDeleted; }

    void add_occurrence(std::size_t i) {
        const PairKey key{sym_[i], sym_[next_[i]]};
        PairRecord& rec = table_[key];
        if (!rec.positions.empty() && rec.positions.back() > i) rec.sorted = false;
        rec.positions.push_back(i);
        ++rec.bound;
        rec.exact = false;
        dirty_.push_back(key);
    }

    void invalidate(std::size_t i) {
        if (next_[i] == kNone) return;
        const std::uint64_t a = sym_[i];
        const std::uint64_t b = sym_[next_[i]];
        if (!pairable(a) || !pairable(b)) return;
        auto it = table_.find({a, b});
        if (it != table_.end()) it->second.exact = false;
    }

    bool occurs_at(const PairKey& key, std::size_t i) const {
        return sym_[i] == key.a && next_[i] != kNone && sym_[next_[i]] == key.b;
    }

    // Drops stale positions (keeping overlapping ones, which may become
    // countable later) and sets the bound to the non-overlapping count.
    void compact(const PairKey& key, PairRecord& rec) {
        if (!rec.sorted) {
            std::sort(rec.positions.begin(), rec.positions.end());
            rec.sorted = true;
        }
        std::vector<std::size_t> kept;
        kept.reserve(rec.positions.size());
        std::size_t count = 0;
        std::int64_t last_next = kNone;
        for (auto i : rec.positions) {
            if (!kept.empty() && kept.back() == i) continue;
            if (!occurs_at(key, i)) continue;
            kept.push_back(i);
            if (key.a == key.b && last_next == static_cast<std::int64_t>(i)) continue;
            ++count;
            last_next = next_[i];
        }
        rec.positions = std::move(kept);
        rec.bound = count;
        rec.exact = true;
    }

    void replace(const PairKey& key) {
        const std::uint64_t x = boundary_ + rules_.size();
        rules_.emplace_back(key.a, key.b);
        std::vector<std::size_t> positions = std::move(table_[key].positions);
        table_.erase(key);
        dirty_.clear();

        // An occurrence overlapping the previous replacement starts at its
        // deleted right half and fails occurs_at.
        for (auto i : positions) {
            if (!occurs_at(key, i)) continue;
            const auto j = static_cast<std::size_t>(next_[i]);
            const std::int64_t p = prev_[i];
            const std::int64_t q = next_[j];
            if (p != kNone) invalidate(static_cast<std::size_t>(p));
            invalidate(j);

            sym_[i] = x;
            sym_[j] = kDeleted;
            next_[i] = q;
            if (q != kNone) prev_[q] = static_cast<std::int64_t>(i);

            if (p != kNone && pairable(sym_[p])) add_occurrence(static_cast<std::size_t>(p));
            if (q != kNone && pairable(sym_[q])) add_occurrence(i);
        }

        std::sort(dirty_.begin(), dirty_.end(), [](const PairKey& l, const PairKey& r) {
            return l.a != r.a ? l.a < r.a : l.b < r.b;
        });
        dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
        for (const auto& k : dirty_) {
            const auto it = table_.find(k);
            if (it != table_.end() && it->second.bound >= 2) heap_.push({it->second.bound, k.a, k.b});
        }
        dirty_.clear();
    }

    std::uint64_t boundary_;
    std::vector<std::uint64_t> sym_;
    std::vector<std::int64_t> prev_;
    std::vector<std::int64_t> next_;
    std::unordered_map<PairKey, PairRecord, PairKeyHash> table_;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rules_;
    std::vector<PairKey> dirty_;
};

Region bounding(const Region& a, const Region& b) {
    return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
}

Region origin_box(const Displacement& d) {
    return {std::min<std::int64_t>(0, d.dx), std::min<std::int64_t>(0, d.dy), std::max<std::int64_t>(0, d.dx),
            std::max<std::int64_t>(0, d.dy)};
}

constexpr std::size_t kCoordsPerRule = 6;

}  // namespace

RePairResult repair_compress(const std::vector<std::vector<std::uint64_t>>& streams, std::uint64_t terminal_boundary) {
    if (terminal_boundary < kEventSymbols || terminal_boundary >= kDeleted) {
        throw std::invalid_argument("repair_compress: bad terminal boundary");
    }
    RePair rp(streams, terminal_boundary);
    rp.run();
    return rp.result(streams.size());
}

RuleDictionary RuleDictionary::enrich(std::uint64_t terminal_boundary,
                                      const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rules) {
    if (terminal_boundary < kEventSymbols) throw std::invalid_argument("RuleDictionary: bad terminal boundary");
    RuleDictionary d;
    d.terminal_boundary_ = terminal_boundary;
    d.rule_count_ = rules.size();

    std::vector<Instant> spans(rules.size());
    std::vector<Displacement> disps(rules.size());
    std::vector<Region> boxes(rules.size());
    auto info = [&](std::uint64_t v, std::size_t self, Instant& span, Displacement& disp, Region& box) {
        if (v < kEventSymbols) throw std::logic_error("RuleDictionary: event symbol inside a rule");
        if (v < terminal_boundary) {
            span = 1;
            disp = spiral::decode(v - kEventSymbols);
            box = origin_box(disp);
            return;
        }
        const std::uint64_t id = v - terminal_boundary;
        if (id >= self) throw std::logic_error("RuleDictionary: rule references a later rule");
        span = spans[id];
        disp = disps[id];
        box = boxes[id];
    };

    std::vector<std::uint64_t> flat;
    flat.reserve(rules.size() * 2);
    std::vector<std::uint64_t> coords;
    coords.reserve(rules.size() * kCoordsPerRule);
    for (std::size_t r = 0; r < rules.size(); ++r) {
        Instant sa, sb;
        Displacement da, db;
        Region ba, bb;
        info(rules[r].first, r, sa, da, ba);
        info(rules[r].second, r, sb, db, bb);
        spans[r] = sa + sb;
        disps[r] = da + db;
        boxes[r] = bounding(ba, bb.shifted(da));
        flat.push_back(rules[r].first);
        flat.push_back(rules[r].second);
        for (auto v : {disps[r].dx, disps[r].dy, boxes[r].x1, boxes[r].y1, boxes[r].x2, boxes[r].y2}) {
            coords.push_back(zigzag(v));
        }
    }
    d.pairs_ = IntVector::from_values(flat);
    d.spans_ = DacSequence::build(spans);
    d.coords_ = DacSequence::build(coords);
    d.compute_depth();
    return d;
}

void RuleDictionary::compute_depth() {
    std::vector<unsigned> depth(rule_count_, 0);
    depth_ = 0;
    for (std::size_t r = 0; r < rule_count_; ++r) {
        unsigned d = 0;
        for (std::size_t side = 0; side < 2; ++side) {
            const std::uint64_t v = pairs_[2 * r + side];
            if (v >= terminal_boundary_) d = std::max(d, depth[v - terminal_boundary_]);
        }
        depth[r] = d + 1;
        depth_ = std::max(depth_, depth[r]);
    }
}

void RuleDictionary::check_symbol(Symbol s) const {
    if (s.is_event()) throw std::invalid_argument("RuleDictionary: event symbols carry no geometry");
    if (is_rule(s) && s.value - terminal_boundary_ >= rule_count_) {
        throw std::out_of_range("RuleDictionary: unknown rule " + std::to_string(s.value));
    }
}

std::pair<Symbol, Symbol> RuleDictionary::children(Symbol rule) const {
    if (!is_rule(rule)) throw std::invalid_argument("RuleDictionary::children: not a rule");
    check_symbol(rule);
    const std::size_t id = rule.value - terminal_boundary_;
    return {Symbol{pairs_[2 * id]}, Symbol{pairs_[2 * id + 1]}};
}

EnrichedRule RuleDictionary::rule(std::size_t id) const {
    const Symbol s{terminal_boundary_ + id};
    const auto [a, b] = children(s);
    return {a, b, span(s), displacement(s), mbr(s)};
}

Instant RuleDictionary::span(Symbol s) const {
    check_symbol(s);
    if (!is_rule(s)) return 1;
    return spans_[s.value - terminal_boundary_];
}

Displacement RuleDictionary::displacement(Symbol s) const {
    check_symbol(s);
    if (!is_rule(s)) return spiral::decode(s.value - kEventSymbols);
    const std::size_t base = (s.value - terminal_boundary_) * kCoordsPerRule;
    return {unzigzag(coords_[base]), unzigzag(coords_[base + 1])};
}

Region RuleDictionary::mbr(Symbol s) const {
    check_symbol(s);
    if (!is_rule(s)) return origin_box(spiral::decode(s.value - kEventSymbols));
    const std::size_t base = (s.value - terminal_boundary_) * kCoordsPerRule;
    return {unzigzag(coords_[base + 2]), unzigzag(coords_[base + 3]), unzigzag(coords_[base + 4]),
            unzigzag(coords_[base + 5])};
}

std::vector<spiral::Code> RuleDictionary::expand(Symbol s) const {
    check_symbol(s);
    std::vector<spiral::Code> out;
    std::vector<Symbol> stack{s};
    while (!stack.empty()) {
        const Symbol top = stack.back();
        stack.pop_back();
        if (is_rule(top)) {
            const auto [a, b] = children(top);
            stack.push_back(b);
            stack.push_back(a);
        } else {
            out.push_back(top.value - kEventSymbols);
        }
    }
    return out;
}

std::size_t RuleDictionary::size_in_bytes() const {
    return pairs_.size_in_bytes() + spans_.size_in_bytes() + coords_.size_in_bytes() + 16;
}

void RuleDictionary::serialize(ByteWriter& out) const {
    out.u64(terminal_boundary_);
    out.u64(rule_count_);
    pairs_.serialize(out);
    spans_.serialize(out);
    coords_.serialize(out);
}

RuleDictionary RuleDictionary::deserialize(ByteReader& in) {
    RuleDictionary d;
    d.terminal_boundary_ = in.u64();
    d.rule_count_ = in.u64();
    if (d.terminal_boundary_ < kEventSymbols) throw FormatError("rule dictionary: bad terminal boundary");
    d.pairs_ = IntVector::deserialize(in);
    d.spans_ = DacSequence::deserialize(in);
    d.coords_ = DacSequence::deserialize(in);
    if (d.pairs_.size() != 2 * d.rule_count_ || d.spans_.size() != d.rule_count_ ||
        d.coords_.size() != kCoordsPerRule * d.rule_count_) {
        throw FormatError("rule dictionary: array sizes inconsistent with rule count");
    }
    for (std::size_t r = 0; r < d.rule_count_; ++r) {
        for (std::size_t side = 0; side < 2; ++side) {
            const std::uint64_t v = d.pairs_[2 * r + side];
            if (v < kEventSymbols || (v >= d.terminal_boundary_ && v - d.terminal_boundary_ >= r)) {
                throw FormatError("rule dictionary: rule " + std::to_string(r) + " has an invalid child");
            }
        }
    }
    d.compute_depth();
    return d;
}

}  // namespace gract
