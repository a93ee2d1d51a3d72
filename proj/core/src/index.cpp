#include "gract/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "gract/geometry.hpp"

namespace gract {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'T', 'I'};
constexpr double kDistanceSlack = 1e-9;

bool is_movement(const RuleDictionary& dict, Symbol s) { return !s.is_event() && (dict.is_rule(s) || dict.is_move(s)); }

// Walks forward until the object's cell at t is known, or it is known to be
// missing at t. The walk starts at or before t.
std::optional<Cell> locate_forward(LogWalker& w, Instant t) {
    while (true) {
        const WalkState& st = w.state();
        if (st.present && st.t == t) return st.pos;
        if (w.done()) return std::nullopt;
        const Symbol s = w.current();
        const WalkState nxt = w.after();
        if (s.is_event()) {
            if (s.event() == EventKind::Disappear || nxt.t > t) return std::nullopt;
            w.advance();
        } else if (nxt.t <= t) {
            w.advance();
        } else {
            w.descend();
        }
    }
}

// Mirror of locate_forward for a walk that starts at or after t.
std::optional<Cell> locate_backward(LogWalker& w, Instant t) {
    while (true) {
        const WalkState& st = w.state();
        if (st.present && st.t == t) return st.pos;
        if (w.done()) return std::nullopt;
        const Symbol s = w.current();
        const WalkState nxt = w.after();
        if (s.is_event()) {
            if (s.event() == EventKind::AbsoluteAppear || nxt.t < t) return std::nullopt;
            w.advance();
        } else if (nxt.t >= t) {
            w.advance();
        } else {
            w.descend();
        }
    }
}

void count(QueryCounters* c, const LogWalker& w) {
    if (c != nullptr) c->symbols_examined += w.symbols_examined();
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

void put_section(ByteWriter& out, const std::vector<std::uint8_t>& body) {
    out.u64(body.size());
    out.bytes(body);
    out.u32(crc_of(body));
}

std::vector<std::uint8_t> get_section(ByteReader& in, const char* name) {
    const std::uint64_t n = in.u64();
    if (n > in.remaining()) throw FormatError(std::string("truncated ") + name + " section");
    const auto span = in.bytes(n);
    std::vector<std::uint8_t> body(span.begin(), span.end());
    if (in.u32() != crc_of(body)) throw FormatError(std::string("checksum mismatch in ") + name + " section");
    return body;
}

std::string cell_text(const Cell& c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

}  // namespace

// ---------------------------------------------------------------- helpers

Region expanded_region(const Region& r, Instant t_b, Instant t_e, std::uint64_t max_speed, std::uint64_t grid_side) {
    if (t_e < t_b) throw std::invalid_argument("expanded_region: t_e before t_b");
    const auto delta = static_cast<std::int64_t>(max_speed * (t_e - t_b));
    return expand_region(r, delta, static_cast<std::int64_t>(grid_side));
}

std::uint64_t compute_max_speed(const TrajectorySet& data) {
    std::uint64_t best = 1;
    for (const auto& fixes : data.objects) {
        for (std::size_t i = 1; i < fixes.size(); ++i) {
            const auto d2 = static_cast<std::uint64_t>(squared_distance(fixes[i].cell, fixes[i - 1].cell));
            const std::uint64_t dt = fixes[i].t - fixes[i - 1].t;
            auto m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(d2)) / static_cast<double>(dt)));
            while (m > 0 && (m - 1) * dt * (m - 1) * dt >= d2) --m;
            while (m * dt * m * dt < d2) ++m;
            best = std::max(best, m);
        }
    }
    return best;
}

std::string TrajectoryElement::to_string(const RuleDictionary& dict) const {
    switch (kind) {
        case Kind::SnapshotPosition:
            return "S" + cell_text(after.pos);
        case Kind::Movement:
            if (dict.is_rule(symbol)) return "R" + std::to_string(symbol.value - dict.terminal_boundary());
            return std::to_string(symbol.value - kEventSymbols);
        case Kind::Event:
            break;
    }
    switch (symbol.event()) {
        case EventKind::AbsoluteAppear:
            return "AA_" + std::to_string(event_value) + cell_text(after.pos);
        case EventKind::Disappear:
            return "D_" + std::to_string(event_value) + cell_text(before.pos);
        case EventKind::RelativeMove:
            return "RM_" + std::to_string(event_value) + cell_text(after.pos);
        case EventKind::RelativeNoMove:
            return "RNM_" + std::to_string(event_value);
    }
    return "?";
}

// ---------------------------------------------------------------- build

Index Index::build(const TrajectorySet& data, const IndexParams& params) {
    if (params.period == 0) throw std::invalid_argument("Index: period must be at least 1");
    if (params.k < 2 || params.k > 16) throw std::invalid_argument("Index: k must be in [2, 16]");
    data.validate();

    Index idx;
    idx.params_ = params;
    idx.objects_ = data.object_count();
    idx.last_instant_ = data.last_instant;
    idx.grid_side_ = data.grid_side;
    idx.max_speed_ = compute_max_speed(data);

    const Instant d = params.period;
    const Instant last = data.last_instant;
    const std::size_t n = idx.objects_;
    const std::size_t snapshots = last / d + 1;
    const std::size_t portions = (last + d - 1) / d;

    std::vector<RawLog> logs(portions * n);
    std::vector<std::vector<PlacedObject>> placed(snapshots);
    for (std::size_t o = 0; o < n; ++o) {
        const auto& fixes = data.objects[o];
        for (const auto& f : fixes) {
            if (f.t % d == 0) placed[f.t / d].push_back({static_cast<ObjectId>(o), f.cell});
        }
        std::size_t i = 0;
        std::vector<std::optional<Cell>> window;
        for (std::size_t h = 0; h < portions; ++h) {
            const Instant start = h * d;
            const Instant end = std::min(start + d, last);
            while (i < fixes.size() && fixes[i].t < start) ++i;
            if (i == fixes.size() || fixes[i].t > end) continue;
            window.assign(end - start + 1, std::nullopt);
            for (std::size_t j = i; j < fixes.size() && fixes[j].t <= end; ++j) window[fixes[j].t - start] = fixes[j].cell;
            logs[h * n + o] = encode_log(window, start);
        }
    }

    idx.logs_ = LogStore::build(logs, portions, n);
    idx.snapshots_.reserve(snapshots);
    for (std::size_t j = 0; j < snapshots; ++j) {
        std::vector<ObjectId> appear;
        std::vector<ObjectId> disappear;
        for (std::size_t o = 0; o < n; ++o) {
            if (j < portions && idx.logs_.starts_with_appear(j, static_cast<ObjectId>(o))) {
                appear.push_back(static_cast<ObjectId>(o));
            }
            if (j > 0 && idx.logs_.ends_with_disappear(j - 1, static_cast<ObjectId>(o))) {
                disappear.push_back(static_cast<ObjectId>(o));
            }
        }
        idx.snapshots_.push_back(Snapshot::build(j * d, placed[j], n, std::max<std::uint64_t>(data.grid_side, 1),
                                                 params.k, std::move(appear), std::move(disappear),
                                                 params.perm_sample_rate));
    }
    return idx;
}

// ---------------------------------------------------------------- internals

std::size_t Index::pick_snapshot(Instant t, bool nearest) const {
    const Instant d = params_.period;
    std::size_t j = t / d;
    if (nearest && 2 * (t % d) > d) ++j;
    return std::min(j, snapshots_.size() - 1);
}

Instant Index::portion_end(std::size_t h) const { return std::min((h + 1) * params_.period, last_instant_); }

WalkState Index::snapshot_state(std::size_t j, ObjectId o) const {
    const auto pos = snapshots_[j].find_object(o);
    return {j * params_.period, pos.value_or(Cell{}), pos.has_value()};
}

bool Index::present_at(std::size_t h, ObjectId o, Instant t, WalkState start, QueryCounters* counters) const {
    if (start.present && logs_.event_count(h, o) == 0) return true;
    LogWalker w(logs_, h, o, Direction::Forward, start);
    const bool found = locate_forward(w, t).has_value();
    count(counters, w);
    return found;
}

Region Index::grid() const {
    const auto s = static_cast<std::int64_t>(grid_side_);
    return {0, 0, s - 1, s - 1};
}

// ---------------------------------------------------------------- compressed trajectory

std::vector<TrajectoryElement> Index::ct(ObjectId o, Instant t_b, Instant t_e) const {
    if (o >= objects_) throw std::out_of_range("unknown object " + std::to_string(o));
    std::vector<TrajectoryElement> out;
    if (t_b > t_e || t_b > last_instant_) return out;
    t_e = std::min(t_e, last_instant_);
    const Instant d = params_.period;
    const std::size_t h0 = t_b / d;
    if (h0 * d == t_b) {
        const WalkState s = snapshot_state(h0, o);
        if (s.present) out.push_back({TrajectoryElement::Kind::SnapshotPosition, Symbol{}, s, s, 0});
    }
    const RuleDictionary& dict = dictionary();
    for (std::size_t h = h0; h < portion_count() && h * d < t_e; ++h) {
        LogWalker w(logs_, h, o, Direction::Forward, snapshot_state(h, o));
        while (!w.done()) {
            const WalkState before = w.state();
            const Symbol s = w.current();
            const WalkState after = w.after();
            if (s.is_event()) {
                const Instant at = s.event() == EventKind::Disappear ? before.t : after.t;
                if (at > t_e) return out;
                if (at >= t_b) out.push_back({TrajectoryElement::Kind::Event, s, before, after, w.event_argument()});
            } else {
                if (before.t >= t_e) return out;
                if (after.t >= t_b && is_movement(dict, s)) {
                    out.push_back({TrajectoryElement::Kind::Movement, s, before, after, 0});
                }
            }
            w.advance();
        }
    }
    return out;
}

// ---------------------------------------------------------------- object

std::optional<Cell> Index::search_object(ObjectId o, Instant t, const QueryOptions& opt,
                                         QueryCounters* counters) const {
    if (o >= objects_ || t > last_instant_) return std::nullopt;
    const std::size_t j = pick_snapshot(t, opt.nearest_snapshot);
    const Instant ts = j * params_.period;
    if (ts == t) return snapshots_[j].find_object(o);
    if (ts < t) {
        LogWalker w(logs_, j, o, Direction::Forward, snapshot_state(j, o));
        auto r = locate_forward(w, t);
        count(counters, w);
        return r;
    }
    LogWalker w(logs_, j - 1, o, Direction::Backward, snapshot_state(j, o));
    auto r = locate_backward(w, t);
    count(counters, w);
    return r;
}

// ---------------------------------------------------------------- trajectory

std::vector<TimedCell> Index::search_trajectory(ObjectId o, Instant t_b, Instant t_e, QueryCounters* counters) const {
    std::vector<TimedCell> out;
    if (o >= objects_ || t_b > t_e || t_b > last_instant_) return out;
    t_e = std::min(t_e, last_instant_);
    const Instant d = params_.period;
    const std::size_t h0 = t_b / d;
    if (h0 * d == t_b) {
        if (const auto p = snapshots_[h0].find_object(o)) out.push_back({t_b, *p});
    }
    for (std::size_t h = h0; h < portion_count() && h * d < t_e; ++h) {
        LogWalker w(logs_, h, o, Direction::Forward, snapshot_state(h, o));
        bool finished = false;
        while (!w.done() && !finished) {
            const Symbol s = w.current();
            const WalkState nxt = w.after();
            if (s.is_event()) {
                if (s.event() == EventKind::Disappear) break;
                if (nxt.t > t_e) {
                    finished = true;
                    break;
                }
                w.advance();
                if (w.state().t >= t_b) out.push_back({w.state().t, w.state().pos});
                continue;
            }
            if (nxt.t < t_b) {
                w.advance();
            } else if (w.state().t >= t_e) {
                finished = true;
            } else if (dictionary().is_rule(s)) {
                w.descend();
            } else {
                w.advance();
                out.push_back({w.state().t, w.state().pos});
            }
        }
        count(counters, w);
        if (finished) break;
    }
    return out;
}

// ---------------------------------------------------------------- time slice

std::vector<PlacedObject> Index::time_slice(const Region& region, Instant t, const QueryOptions& opt,
                                            QueryCounters* counters) const {
    std::vector<PlacedObject> out;
    const Region r = region.intersection(grid());
    if (r.empty() || t > last_instant_ || objects_ == 0) return out;
    const std::size_t j = pick_snapshot(t, opt.nearest_snapshot);
    const Instant ts = j * params_.period;
    const Snapshot& snap = snapshots_[j];
    const RuleDictionary& dict = dictionary();

    auto er_at = [&](Instant tc) {
        if (!opt.er_pruning) return grid();
        return tc <= t ? expanded_region(r, tc, t, max_speed_, grid_side_) : expanded_region(r, t, tc, max_speed_, grid_side_);
    };

    if (ts == t) {
        out = snap.objects_in_region(r);
    } else if (ts < t) {
        const std::size_t h = j;
        const Region er = er_at(ts);
        std::vector<WalkState> starts;
        std::vector<ObjectId> ids;
        for (const auto& p : snap.objects_in_region(er)) {
            ids.push_back(p.id);
            starts.push_back({ts, p.cell, true});
        }
        for (auto o : snap.appear()) {
            const Instant ta = logs_.d_value(h, o, 0);
            if (ta > t) continue;
            const Cell pa{static_cast<std::int64_t>(logs_.p_value(h, o, 0)), static_cast<std::int64_t>(logs_.p_value(h, o, 1))};
            if (!er_at(ta).contains(pa)) continue;
            ids.push_back(o);
            starts.push_back({ts, Cell{}, false});
        }
        for (std::size_t c = 0; c < ids.size(); ++c) {
            if (counters != nullptr) ++counters->candidates;
            LogWalker w(logs_, h, ids[c], Direction::Forward, starts[c]);
            while (true) {
                const WalkState& st = w.state();
                if (st.present && st.t == t) {
                    if (r.contains(st.pos)) out.push_back({ids[c], st.pos});
                    break;
                }
                if (w.done()) break;
                const Symbol s = w.current();
                const WalkState nxt = w.after();
                if (s.is_event()) {
                    if (s.event() == EventKind::Disappear || nxt.t > t) break;
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                    continue;
                }
                if (nxt.t < t) {
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                } else if (nxt.t == t) {
                    w.advance();
                } else {
                    if (opt.mbr_pruning && !dict.mbr(s).shifted(st.pos - Cell{}).intersects(r)) break;
                    w.descend();
                }
            }
            count(counters, w);
        }
    } else {
        const std::size_t h = j - 1;
        const Region er = er_at(ts);
        std::vector<WalkState> starts;
        std::vector<ObjectId> ids;
        for (const auto& p : snap.objects_in_region(er)) {
            ids.push_back(p.id);
            starts.push_back({ts, p.cell, true});
        }
        for (auto o : snap.disappear()) {
            const std::size_t ne = logs_.event_count(h, o);
            const Instant td = logs_.d_value(h, o, ne - 1);
            if (td < t) continue;
            const std::size_t np = logs_.p_count(h, o);
            const Cell pd{static_cast<std::int64_t>(logs_.p_value(h, o, np - 2)),
                          static_cast<std::int64_t>(logs_.p_value(h, o, np - 1))};
            if (!er_at(td).contains(pd)) continue;
            ids.push_back(o);
            starts.push_back({ts, Cell{}, false});
        }
        for (std::size_t c = 0; c < ids.size(); ++c) {
            if (counters != nullptr) ++counters->candidates;
            LogWalker w(logs_, h, ids[c], Direction::Backward, starts[c]);
            while (true) {
                const WalkState& st = w.state();
                if (st.present && st.t == t) {
                    if (r.contains(st.pos)) out.push_back({ids[c], st.pos});
                    break;
                }
                if (w.done()) break;
                const Symbol s = w.current();
                const WalkState nxt = w.after();
                if (s.is_event()) {
                    if (s.event() == EventKind::AbsoluteAppear || nxt.t < t) break;
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                    continue;
                }
                if (nxt.t > t) {
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                } else if (nxt.t == t) {
                    w.advance();
                } else {
                    // The symbol ends at st.pos, so it starts at st.pos - disp.
                    const Region covered = dict.mbr(s).shifted((st.pos - dict.displacement(s)) - Cell{});
                    if (opt.mbr_pruning && !covered.intersects(r)) break;
                    w.descend();
                }
            }
            count(counters, w);
        }
    }
    std::sort(out.begin(), out.end(), [](const PlacedObject& a, const PlacedObject& b) { return a.id < b.id; });
    return out;
}

// ---------------------------------------------------------------- time interval

std::vector<ObjectId> Index::time_interval(const Region& region, Instant t_b, Instant t_e, const QueryOptions& opt,
                                           QueryCounters* counters) const {
    std::vector<ObjectId> out;
    const Region r = region.intersection(grid());
    if (r.empty() || t_b > t_e || t_b > last_instant_ || objects_ == 0) return out;
    t_e = std::min(t_e, last_instant_);
    const Instant d = params_.period;
    const RuleDictionary& dict = dictionary();
    std::vector<bool> reported(objects_, false);

    const std::size_t h0 = t_b / d;
    if (h0 * d == t_b) {
        for (const auto& p : snapshots_[h0].objects_in_region(r)) reported[p.id] = true;
    }
    for (std::size_t h = h0; h < portion_count() && h * d < t_e; ++h) {
        const Instant ts = h * d;
        const Instant t_last = std::min(t_e, portion_end(h));
        auto er_at = [&](Instant tc) {
            if (!opt.er_pruning) return grid();
            return expanded_region(r, tc, t_last, max_speed_, grid_side_);
        };
        const Snapshot& snap = snapshots_[h];
        std::vector<ObjectId> ids;
        std::vector<WalkState> starts;
        for (const auto& p : snap.objects_in_region(er_at(ts))) {
            if (reported[p.id]) continue;
            ids.push_back(p.id);
            starts.push_back({ts, p.cell, true});
        }
        for (auto o : snap.appear()) {
            if (reported[o]) continue;
            const Instant ta = logs_.d_value(h, o, 0);
            if (ta > t_last) continue;
            const Cell pa{static_cast<std::int64_t>(logs_.p_value(h, o, 0)), static_cast<std::int64_t>(logs_.p_value(h, o, 1))};
            if (!er_at(ta).contains(pa)) continue;
            ids.push_back(o);
            starts.push_back({ts, Cell{}, false});
        }
        for (std::size_t c = 0; c < ids.size(); ++c) {
            if (counters != nullptr) ++counters->candidates;
            LogWalker w(logs_, h, ids[c], Direction::Forward, starts[c]);
            bool hit = false;
            while (true) {
                const WalkState& st = w.state();
                if (st.present && st.t >= t_b && st.t <= t_last && r.contains(st.pos)) {
                    hit = true;
                    break;
                }
                if (w.done() || (st.present && st.t >= t_last)) break;
                const Symbol s = w.current();
                const WalkState nxt = w.after();
                if (s.is_event()) {
                    if (s.event() == EventKind::Disappear || nxt.t > t_last) break;
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                    continue;
                }
                if (nxt.t < t_b) {
                    w.advance();
                    if (!er_at(w.state().t).contains(w.state().pos)) break;
                    continue;
                }
                if (dict.is_rule(s)) {
                    if (opt.mbr_pruning) {
                        const Region box = dict.mbr(s).shifted(st.pos - Cell{});
                        if (r.contains(box)) {
                            hit = true;
                            break;
                        }
                        if (!box.intersects(r)) {
                            w.advance();
                            if (w.state().t >= t_last) break;
                            if (!er_at(w.state().t).contains(w.state().pos)) break;
                            continue;
                        }
                    }
                    w.descend();
                    continue;
                }
                w.advance();
                const WalkState& now = w.state();
                if (now.t <= t_last && r.contains(now.pos)) continue;  // reported at the loop head
                if (now.t >= t_last) break;
                if (!er_at(now.t).contains(now.pos)) break;
            }
            count(counters, w);
            if (hit) reported[ids[c]] = true;
        }
    }
    for (std::size_t o = 0; o < objects_; ++o) {
        if (reported[o]) out.push_back(static_cast<ObjectId>(o));
    }
    return out;
}

// ---------------------------------------------------------------- knn

std::vector<Neighbor> Index::knn(std::size_t k, Cell q, Instant t, const QueryOptions& /*opt*/,
                                 QueryCounters* counters) const {
    std::vector<Neighbor> out;
    if (k == 0 || t > last_instant_ || objects_ == 0) return out;
    const Instant d = params_.period;
    const std::size_t h = t / d;
    const Instant ts = h * d;
    const Snapshot& snap = snapshots_[h];
    auto by_distance = [](const Neighbor& a, const Neighbor& b) {
        return a.squared_distance != b.squared_distance ? a.squared_distance < b.squared_distance : a.id < b.id;
    };

    if (ts == t) {
        auto stream = snap.candidates_by_distance(q);
        while (auto item = stream.next()) {
            if (out.size() >= k && item->squared_distance > out.back().squared_distance) break;
            out.push_back({item->id, item->squared_distance, std::sqrt(static_cast<double>(item->squared_distance))});
        }
        std::sort(out.begin(), out.end(), by_distance);
        if (out.size() > k) out.resize(k);
        return out;
    }

    const double speed = static_cast<double>(max_speed_);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<LogWalker> walkers;
    std::priority_queue<double> upper;  // the k smallest verified upper bounds
    auto d_max = [&] { return upper.size() == k ? upper.top() : inf; };
    struct Pending {
        double d_min;
        ObjectId id;
        std::size_t walker;
    };
    auto later = [](const Pending& a, const Pending& b) { return a.d_min != b.d_min ? a.d_min > b.d_min : a.id > b.id; };
    std::priority_queue<Pending, std::vector<Pending>, decltype(later)> queue(later);

    auto admit = [&](ObjectId o, WalkState start, double dist, Instant from) {
        const double slack = speed * static_cast<double>(t - from);
        if (dist - slack > d_max() + kDistanceSlack) return;
        if (!present_at(h, o, t, start, counters)) return;
        if (counters != nullptr) ++counters->candidates;
        walkers.emplace_back(logs_, h, o, Direction::Forward, start);
        queue.push({dist - slack, o, walkers.size() - 1});
        upper.push(dist + slack);
        if (upper.size() > k) upper.pop();
    };

    const double snap_slack = speed * static_cast<double>(t - ts);
    auto stream = snap.candidates_by_distance(q);
    while (const auto next_d2 = stream.peek_squared_distance()) {
        if (std::sqrt(static_cast<double>(*next_d2)) - snap_slack > d_max() + kDistanceSlack) break;
        const auto item = stream.next();
        if (!item) break;
        admit(item->id, {ts, item->cell, true}, std::sqrt(static_cast<double>(item->squared_distance)), ts);
    }
    for (auto o : snap.appear()) {
        const Instant ta = logs_.d_value(h, o, 0);
        if (ta > t) continue;
        const Cell pa{static_cast<std::int64_t>(logs_.p_value(h, o, 0)), static_cast<std::int64_t>(logs_.p_value(h, o, 1))};
        admit(o, {ts, Cell{}, false}, distance(q, pa), ta);
    }

    auto worse = [&](const Neighbor& a, const Neighbor& b) { return by_distance(a, b); };
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(worse);
    while (!queue.empty()) {
        const Pending top = queue.top();
        if (best.size() == k && top.d_min > best.top().distance + kDistanceSlack) break;
        queue.pop();
        LogWalker& w = walkers[top.walker];
        const WalkState& st = w.state();
        if (st.present && st.t == t) {
            const std::int64_t d2 = squared_distance(q, st.pos);
            best.push({top.id, d2, std::sqrt(static_cast<double>(d2))});
            if (best.size() > k) best.pop();
            continue;
        }
        if (w.done()) continue;
        const Symbol s = w.current();
        if (s.is_event()) {
            const WalkState nxt = w.after();
            if (s.event() == EventKind::Disappear || nxt.t > t) continue;
            w.advance();
        } else {
            while (w.after().t > t) w.descend();
            w.advance();
        }
        const WalkState& now = w.state();
        queue.push({distance(q, now.pos) - speed * static_cast<double>(t - now.t), top.id, top.walker});
    }
    for (const auto& w : walkers) count(counters, w);
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::sort(out.begin(), out.end(), by_distance);
    return out;
}

// ---------------------------------------------------------------- reconstruction, stats, I/O

TrajectorySet Index::reconstruct() const {
    TrajectorySet out;
    out.grid_side = grid_side_;
    out.last_instant = last_instant_;
    out.objects.resize(objects_);
    for (std::size_t o = 0; o < objects_; ++o) {
        for (const auto& tc : search_trajectory(static_cast<ObjectId>(o), 0, last_instant_)) {
            out.objects[o].push_back({tc.t, tc.cell});
        }
    }
    return out;
}

namespace {

struct Sections {
    std::vector<std::uint8_t> params;
    std::vector<std::uint8_t> snapshots;
    std::vector<std::uint8_t> grammar;
    std::vector<std::uint8_t> logs;
};

}  // namespace

IndexStats Index::stats() const {
    IndexStats st;
    st.objects = objects_;
    st.snapshots = snapshots_.size();
    st.portions = portion_count();
    st.period = params_.period;
    st.last_instant = last_instant_;
    st.grid_side = grid_side_;
    st.max_speed = max_speed_;

    for (const auto& s : snapshots_) {
        ByteWriter w;
        s.serialize(w);
        st.snapshot_bytes += w.size();
    }
    {
        ByteWriter w;
        dictionary().serialize(w);
        st.dictionary_bytes = w.size();
    }
    {
        ByteWriter w;
        logs_.serialize(w);
        st.log_bytes = w.size();
    }
    const LogStoreStats ls = logs_.stats();
    st.event_bytes = ls.event_bytes;
    st.raw_symbols = ls.raw_symbols;
    st.compressed_symbols = ls.compressed_symbols;
    st.events = ls.events;
    st.rules = dictionary().rule_count();
    st.grammar_depth = dictionary().depth();
    st.total_bytes = serialize().size();
    st.log_ratio = st.raw_symbols == 0
                       ? 0.0
                       : static_cast<double>(st.log_bytes + st.dictionary_bytes) / static_cast<double>(st.raw_symbols);
    return st;
}

std::vector<std::uint8_t> Index::serialize() const {
    ByteWriter params;
    params.u64(params_.period);
    params.u8(static_cast<std::uint8_t>(params_.k));
    params.u8(static_cast<std::uint8_t>(params_.perm_sample_rate));
    params.u64(objects_);
    params.u64(last_instant_);
    params.u64(grid_side_);
    params.u64(max_speed_);

    ByteWriter snaps;
    snaps.u64(snapshots_.size());
    for (const auto& s : snapshots_) s.serialize(snaps);

    ByteWriter grammar;
    dictionary().serialize(grammar);

    ByteWriter logs;
    logs_.serialize(logs);

    ByteWriter out;
    out.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
    out.u16(kFormatVersion);
    put_section(out, params.data());
    put_section(out, snaps.data());
    put_section(out, grammar.data());
    put_section(out, logs.data());
    return out.take();
}

Index Index::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    const auto magic = in.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const std::uint8_t*>(kMagic))) {
        throw FormatError("not an index file (bad magic)");
    }
    const std::uint16_t version = in.u16();
    if (version != kFormatVersion) throw FormatError("unsupported index format version " + std::to_string(version));

    const auto params_bytes = get_section(in, "params");
    const auto snap_bytes = get_section(in, "snapshots");
    const auto grammar_bytes = get_section(in, "grammar");
    const auto log_bytes = get_section(in, "logs");
    if (in.remaining() != 0) throw FormatError("trailing bytes after last section");

    Index idx;
    ByteReader p(params_bytes);
    idx.params_.period = p.u64();
    idx.params_.k = p.u8();
    idx.params_.perm_sample_rate = p.u8();
    idx.objects_ = p.u64();
    idx.last_instant_ = p.u64();
    idx.grid_side_ = p.u64();
    idx.max_speed_ = p.u64();
    if (p.remaining() != 0 || idx.params_.period == 0 || idx.params_.k < 2 || idx.params_.perm_sample_rate == 0 ||
        idx.max_speed_ == 0) {
        throw FormatError("invalid params section");
    }

    ByteReader s(snap_bytes);
    const std::uint64_t count = s.u64();
    if (count != idx.last_instant_ / idx.params_.period + 1) throw FormatError("snapshot count does not match extent");
    for (std::uint64_t j = 0; j < count; ++j) {
        idx.snapshots_.push_back(Snapshot::deserialize(s));
        const Snapshot& snap = idx.snapshots_.back();
        if (snap.time() != j * idx.params_.period || snap.object_count() != idx.objects_ ||
            snap.tree().k() != idx.params_.k) {
            throw FormatError("snapshot " + std::to_string(j) + " inconsistent with params");
        }
    }
    if (s.remaining() != 0) throw FormatError("trailing bytes in snapshots section");

    ByteReader g(grammar_bytes);
    RuleDictionary dict = RuleDictionary::deserialize(g);
    if (g.remaining() != 0) throw FormatError("trailing bytes in grammar section");

    ByteReader l(log_bytes);
    idx.logs_ = LogStore::deserialize(l, std::move(dict));
    if (l.remaining() != 0) throw FormatError("trailing bytes in logs section");
    if (idx.logs_.objects() != idx.objects_ ||
        idx.logs_.portions() != (idx.last_instant_ + idx.params_.period - 1) / idx.params_.period) {
        throw FormatError("log store inconsistent with params");
    }
    return idx;
}

void Index::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Index Index::load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

bool Index::inject_snapshot_fault() {
    if (snapshots_.empty() || snapshots_[0].present_count() < 2) return false;
    snapshots_[0].swap_perm_entries(0, snapshots_[0].present_count() - 1);
    return true;
}

}  // namespace gract
