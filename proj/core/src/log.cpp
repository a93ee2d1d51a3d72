#include "gract/log.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "gract/spiral.hpp"

namespace gract {

namespace {

constexpr std::uint64_t sym(EventKind e) { return static_cast<std::uint64_t>(e); }

std::size_t p_arity(EventKind e) {
    switch (e) {
        case EventKind::AbsoluteAppear:
        case EventKind::Disappear:
            return 2;
        case EventKind::RelativeMove:
            return 1;
        case EventKind::RelativeNoMove:
            return 0;
    }
    return 0;
}

const DacConfig kEventDac = DacConfig::fixed(8, 2);

}  // namespace

RawLog encode_log(std::span<const std::optional<Cell>> positions, Instant start) {
    RawLog log;
    if (positions.empty()) return log;
    bool active = positions[0].has_value();
    bool seen = active;
    Cell last = active ? *positions[0] : Cell{};
    Instant last_t = start;
    for (std::size_t i = 1; i < positions.size(); ++i) {
        const Instant t = start + i;
        if (!positions[i]) {
            active = false;
            continue;
        }
        const Cell& p = *positions[i];
        if (active) {
            log.symbols.push_back(Symbol::move(spiral::encode(p - last)).value);
        } else if (!seen) {
            log.symbols.push_back(sym(EventKind::AbsoluteAppear));
            log.d_values.push_back(t);
            log.p_values.push_back(static_cast<std::uint64_t>(p.x));
            log.p_values.push_back(static_cast<std::uint64_t>(p.y));
            seen = true;
        } else {
            const Instant missing = t - last_t - 1;
            if (p == last) {
                log.symbols.push_back(sym(EventKind::RelativeNoMove));
                log.d_values.push_back(missing);
            } else {
                log.symbols.push_back(sym(EventKind::RelativeMove));
                log.d_values.push_back(missing);
                log.p_values.push_back(spiral::encode(p - last));
            }
        }
        active = true;
        last = p;
        last_t = t;
    }
    if (seen && !active) {
        log.symbols.push_back(sym(EventKind::Disappear));
        log.d_values.push_back(last_t);
        log.p_values.push_back(static_cast<std::uint64_t>(last.x));
        log.p_values.push_back(static_cast<std::uint64_t>(last.y));
    }
    return log;
}

std::vector<std::optional<Cell>> decode_raw_log(const RawLog& log, std::optional<Cell> first, Instant start,
                                                std::size_t length) {
    std::vector<std::optional<Cell>> out(length);
    if (length == 0) return out;
    out[0] = first;
    Cell pos = first.value_or(Cell{});
    Instant t = start;
    std::size_t di = 0;
    std::size_t pi = 0;
    auto put = [&](Instant at, Cell c) {
        if (at < start || at - start >= length) throw std::out_of_range("decode_raw_log: instant outside portion");
        out[at - start] = c;
    };
    for (auto v : log.symbols) {
        const Symbol s{v};
        if (!s.is_event()) {
            pos = pos + spiral::decode(v - kEventSymbols);
            put(++t, pos);
            continue;
        }
        switch (s.event()) {
            case EventKind::AbsoluteAppear:
                t = log.d_values.at(di++);
                pos = {static_cast<std::int64_t>(log.p_values.at(pi)), static_cast<std::int64_t>(log.p_values.at(pi + 1))};
                pi += 2;
                put(t, pos);
                break;
            case EventKind::RelativeMove:
                t += log.d_values.at(di++) + 1;
                pos = pos + spiral::decode(log.p_values.at(pi++));
                put(t, pos);
                break;
            case EventKind::RelativeNoMove:
                t += log.d_values.at(di++) + 1;
                put(t, pos);
                break;
            case EventKind::Disappear:
                ++di;
                pi += 2;
                break;
        }
    }
    return out;
}

LogStore LogStore::build(const std::vector<RawLog>& logs, std::size_t portions, std::size_t objects) {
    if (logs.size() != portions * objects) throw std::invalid_argument("LogStore: expected portions * objects logs");
    LogStore s;
    s.portions_ = portions;
    s.objects_ = objects;

    std::uint64_t boundary = kEventSymbols;
    std::vector<std::vector<std::uint64_t>> streams;
    streams.reserve(logs.size());
    for (const auto& l : logs) {
        for (auto v : l.symbols) boundary = std::max(boundary, v + 1);
        s.raw_symbols_ += l.symbols.size();
        streams.push_back(l.symbols);
    }
    RePairResult rp = repair_compress(streams, boundary);
    s.dict_ = RuleDictionary::enrich(rp.terminal_boundary, rp.rules);

    std::vector<std::uint64_t> flat;
    std::vector<std::uint64_t> sym_off{0};
    std::vector<std::uint64_t> d_off{0};
    std::vector<std::uint64_t> p_off{0};
    sym_off.reserve(logs.size() + 1);
    d_off.reserve(logs.size() + 1);
    p_off.reserve(logs.size() + 1);
    for (std::size_t h = 0; h < portions; ++h) {
        std::vector<std::uint64_t> dv;
        std::vector<std::uint64_t> pv;
        for (std::size_t o = 0; o < objects; ++o) {
            const std::size_t idx = h * objects + o;
            flat.insert(flat.end(), rp.streams[idx].begin(), rp.streams[idx].end());
            sym_off.push_back(flat.size());
            dv.insert(dv.end(), logs[idx].d_values.begin(), logs[idx].d_values.end());
            pv.insert(pv.end(), logs[idx].p_values.begin(), logs[idx].p_values.end());
            d_off.push_back(d_off.back() + logs[idx].d_values.size());
            p_off.push_back(p_off.back() + logs[idx].p_values.size());
        }
        s.d_values_.push_back(DacSequence::build(dv, kEventDac));
        s.p_values_.push_back(DacSequence::build(pv, kEventDac));
    }
    s.symbols_ = IntVector::from_values(flat);
    s.symbol_offsets_ = IntVector::from_values(sym_off);
    s.d_offsets_ = IntVector::from_values(d_off);
    s.p_offsets_ = IntVector::from_values(p_off);
    return s;
}

std::size_t LogStore::slot(std::size_t h, ObjectId o) const {
    if (h >= portions_ || o >= objects_) {
        throw std::out_of_range("LogStore: no log for portion " + std::to_string(h) + " object " + std::to_string(o));
    }
    return h * objects_ + o;
}

std::size_t LogStore::length(std::size_t h, ObjectId o) const {
    const std::size_t i = slot(h, o);
    return symbol_offsets_[i + 1] - symbol_offsets_[i];
}

Symbol LogStore::symbol(std::size_t h, ObjectId o, std::size_t i) const {
    const std::size_t s = slot(h, o);
    const std::size_t at = symbol_offsets_[s] + i;
    if (at >= symbol_offsets_[s + 1]) throw std::out_of_range("LogStore::symbol: index past log end");
    return Symbol{symbols_[at]};
}

std::size_t LogStore::event_count(std::size_t h, ObjectId o) const {
    const std::size_t i = slot(h, o);
    return d_offsets_[i + 1] - d_offsets_[i];
}

std::uint64_t LogStore::d_value(std::size_t h, ObjectId o, std::size_t k) const {
    const std::size_t i = slot(h, o);
    if (k >= d_offsets_[i + 1] - d_offsets_[i]) throw std::out_of_range("LogStore::d_value");
    return d_values_[h][d_offsets_[i] - d_offsets_[h * objects_] + k];
}

std::size_t LogStore::p_count(std::size_t h, ObjectId o) const {
    const std::size_t i = slot(h, o);
    return p_offsets_[i + 1] - p_offsets_[i];
}

std::uint64_t LogStore::p_value(std::size_t h, ObjectId o, std::size_t k) const {
    const std::size_t i = slot(h, o);
    if (k >= p_offsets_[i + 1] - p_offsets_[i]) throw std::out_of_range("LogStore::p_value");
    return p_values_[h][p_offsets_[i] - p_offsets_[h * objects_] + k];
}

bool LogStore::starts_with_appear(std::size_t h, ObjectId o) const {
    return length(h, o) > 0 && symbol(h, o, 0) == Symbol::of(EventKind::AbsoluteAppear);
}

bool LogStore::ends_with_disappear(std::size_t h, ObjectId o) const {
    const std::size_t n = length(h, o);
    return n > 0 && symbol(h, o, n - 1) == Symbol::of(EventKind::Disappear);
}

RawLog LogStore::raw(std::size_t h, ObjectId o) const {
    RawLog out;
    const std::size_t n = length(h, o);
    for (std::size_t i = 0; i < n; ++i) {
        const Symbol s = symbol(h, o, i);
        if (s.is_event() || !dict_.is_rule(s)) {
            out.symbols.push_back(s.value);
        } else {
            for (auto c : dict_.expand(s)) out.symbols.push_back(Symbol::move(c).value);
        }
    }
    for (std::size_t k = 0; k < event_count(h, o); ++k) out.d_values.push_back(d_value(h, o, k));
    for (std::size_t k = 0; k < p_count(h, o); ++k) out.p_values.push_back(p_value(h, o, k));
    return out;
}

LogStoreStats LogStore::stats() const {
    LogStoreStats st;
    st.raw_symbols = raw_symbols_;
    st.compressed_symbols = symbols_.size();
    st.events = d_offsets_.size() == 0 ? 0 : d_offsets_[d_offsets_.size() - 1];
    st.symbol_bytes = symbols_.size_in_bytes();
    st.offset_bytes = symbol_offsets_.size_in_bytes() + d_offsets_.size_in_bytes() + p_offsets_.size_in_bytes();
    for (std::size_t h = 0; h < portions_; ++h) {
        st.event_bytes += d_values_[h].size_in_bytes() + p_values_[h].size_in_bytes();
    }
    st.dictionary_bytes = dict_.size_in_bytes();
    return st;
}

std::size_t LogStore::size_in_bytes() const {
    const LogStoreStats st = stats();
    return st.symbol_bytes + st.offset_bytes + st.event_bytes + st.dictionary_bytes + 24;
}

void LogStore::serialize(ByteWriter& out) const {
    out.u64(portions_);
    out.u64(objects_);
    out.u64(raw_symbols_);
    symbols_.serialize(out);
    symbol_offsets_.serialize(out);
    d_offsets_.serialize(out);
    p_offsets_.serialize(out);
    for (std::size_t h = 0; h < portions_; ++h) {
        d_values_[h].serialize(out);
        p_values_[h].serialize(out);
    }
}

LogStore LogStore::deserialize(ByteReader& in, RuleDictionary dictionary) {
    LogStore s;
    s.portions_ = in.u64();
    s.objects_ = in.u64();
    s.raw_symbols_ = in.u64();
    if (s.objects_ != 0 && s.portions_ > in.remaining() / s.objects_) throw FormatError("log store: bad dimensions");
    s.dict_ = std::move(dictionary);
    s.symbols_ = IntVector::deserialize(in);
    s.symbol_offsets_ = IntVector::deserialize(in);
    s.d_offsets_ = IntVector::deserialize(in);
    s.p_offsets_ = IntVector::deserialize(in);
    const std::size_t slots = s.portions_ * s.objects_ + 1;
    if (s.symbol_offsets_.size() != slots || s.d_offsets_.size() != slots || s.p_offsets_.size() != slots) {
        throw FormatError("log store: offset arrays have wrong length");
    }
    auto check_monotone = [](const IntVector& v, std::uint64_t last, const char* what) {
        if (v[0] != 0 || v[v.size() - 1] != last) throw FormatError(std::string("log store: bad ") + what + " offsets");
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[i - 1]) throw FormatError(std::string("log store: decreasing ") + what + " offsets");
        }
    };
    check_monotone(s.symbol_offsets_, s.symbols_.size(), "symbol");
    for (std::size_t h = 0; h < s.portions_; ++h) {
        s.d_values_.push_back(DacSequence::deserialize(in));
        s.p_values_.push_back(DacSequence::deserialize(in));
    }
    std::uint64_t d_total = 0;
    std::uint64_t p_total = 0;
    for (std::size_t h = 0; h < s.portions_; ++h) {
        d_total += s.d_values_[h].size();
        p_total += s.p_values_[h].size();
        const std::size_t end = (h + 1) * s.objects_;
        if (s.d_offsets_[end] != d_total || s.p_offsets_[end] != p_total) {
            throw FormatError("log store: event arrays inconsistent with offsets");
        }
    }
    check_monotone(s.d_offsets_, d_total, "event");
    check_monotone(s.p_offsets_, p_total, "position");
    const std::uint64_t limit = s.dict_.terminal_boundary() + s.dict_.rule_count();
    for (std::size_t i = 0; i < s.symbols_.size(); ++i) {
        if (s.symbols_[i] >= limit) throw FormatError("log store: symbol outside alphabet");
    }
    return s;
}

// ---------------------------------------------------------------- movement primitives

namespace {

void require_movement(const RuleDictionary& dict, Symbol m) {
    if (m.is_event()) throw std::invalid_argument("movement primitive applied to an event symbol");
    (void)dict.span(m);
}

}  // namespace

TimedCell move_jump(const RuleDictionary& dict, Cell p_c, Instant t_c, Instant limit, Symbol m) {
    require_movement(dict, m);
    if (limit < t_c) throw std::invalid_argument("move_jump: limit before current instant");
    std::vector<Symbol> stack{m};
    while (!stack.empty() && t_c < limit) {
        const Symbol s = stack.back();
        stack.pop_back();
        const Instant span = dict.span(s);
        if (t_c + span <= limit) {
            t_c += span;
            p_c = p_c + dict.displacement(s);
        } else {
            const auto [a, b] = dict.children(s);
            stack.push_back(b);
            stack.push_back(a);
        }
    }
    return {t_c, p_c};
}

TimedCell reverse_move_jump(const RuleDictionary& dict, Cell p_c, Instant floor, Instant t_c, Symbol m) {
    require_movement(dict, m);
    if (floor > t_c) throw std::invalid_argument("reverse_move_jump: floor after current instant");
    std::vector<Symbol> stack{m};
    while (!stack.empty() && t_c > floor) {
        const Symbol s = stack.back();
        stack.pop_back();
        const Instant span = dict.span(s);
        if (t_c - floor >= span) {
            t_c -= span;
            p_c = p_c - dict.displacement(s);
        } else {
            const auto [a, b] = dict.children(s);
            stack.push_back(a);
            stack.push_back(b);
        }
    }
    return {t_c, p_c};
}

std::vector<TimedCell> move_steps(const RuleDictionary& dict, Cell p_c, Instant t_c, Instant limit, Symbol m) {
    require_movement(dict, m);
    std::vector<TimedCell> out;
    for (auto code : dict.expand(m)) {
        if (t_c >= limit) break;
        p_c = p_c + spiral::decode(code);
        out.push_back({++t_c, p_c});
    }
    return out;
}

// ---------------------------------------------------------------- walker

LogWalker::LogWalker(const LogStore& store, std::size_t portion, ObjectId object, Direction dir, WalkState start)
    : store_(&store),
      dict_(&store.dictionary()),
      portion_(portion),
      object_(object),
      dir_(dir),
      state_(start) {
    const std::size_t n = store.length(portion, object);
    if (dir == Direction::Forward) {
        next_top_ = 0;
        end_top_ = n;
        d_cursor_ = 0;
        p_cursor_ = 0;
    } else {
        next_top_ = n;
        end_top_ = 0;
        d_cursor_ = store.event_count(portion, object);
        p_cursor_ = store.p_count(portion, object);
    }
}

Symbol LogWalker::current() const {
    if (!pending_.empty()) return pending_.back();
    if (next_top_ == end_top_) throw std::logic_error("LogWalker: walk finished");
    return store_->symbol(portion_, object_, dir_ == Direction::Forward ? next_top_ : next_top_ - 1);
}

WalkState LogWalker::after() const {
    const Symbol s = current();
    const bool fwd = dir_ == Direction::Forward;
    if (!s.is_event()) {
        const Instant span = dict_->span(s);
        const Displacement d = dict_->displacement(s);
        if (fwd) return {state_.t + span, state_.pos + d, true};
        return {state_.t - span, state_.pos - d, true};
    }
    auto dval = [&](std::size_t k) { return store_->d_value(portion_, object_, k); };
    auto pval = [&](std::size_t k) { return store_->p_value(portion_, object_, k); };
    auto abs_cell = [&](std::size_t k) {
        return Cell{static_cast<std::int64_t>(pval(k)), static_cast<std::int64_t>(pval(k + 1))};
    };
    switch (s.event()) {
        case EventKind::AbsoluteAppear:
            if (fwd) return {dval(d_cursor_), abs_cell(p_cursor_), true};
            return {state_.t, state_.pos, false};
        case EventKind::Disappear:
            if (fwd) return {state_.t, state_.pos, false};
            return {dval(d_cursor_ - 1), abs_cell(p_cursor_ - 2), true};
        case EventKind::RelativeMove: {
            if (fwd) return {state_.t + dval(d_cursor_) + 1, state_.pos + spiral::decode(pval(p_cursor_)), true};
            return {state_.t - dval(d_cursor_ - 1) - 1, state_.pos - spiral::decode(pval(p_cursor_ - 1)), true};
        }
        case EventKind::RelativeNoMove:
            if (fwd) return {state_.t + dval(d_cursor_) + 1, state_.pos, true};
            return {state_.t - dval(d_cursor_ - 1) - 1, state_.pos, true};
    }
    throw std::logic_error("LogWalker: unknown event");
}

std::uint64_t LogWalker::event_argument() const {
    if (!current().is_event()) throw std::logic_error("LogWalker: current symbol is not an event");
    return store_->d_value(portion_, object_, dir_ == Direction::Forward ? d_cursor_ : d_cursor_ - 1);
}

void LogWalker::pop_current() {
    if (!pending_.empty()) {
        pending_.pop_back();
        return;
    }
    const Symbol s = current();
    if (s.is_event()) {
        const std::size_t p = p_arity(s.event());
        if (dir_ == Direction::Forward) {
            ++d_cursor_;
            p_cursor_ += p;
        } else {
            --d_cursor_;
            p_cursor_ -= p;
        }
    }
    if (dir_ == Direction::Forward) {
        ++next_top_;
    } else {
        --next_top_;
    }
}

void LogWalker::advance() {
    state_ = after();
    pop_current();
    ++examined_;
}

void LogWalker::descend() {
    const Symbol s = current();
    if (s.is_event() || !dict_->is_rule(s)) throw std::logic_error("LogWalker::descend: not a rule");
    const auto [a, b] = dict_->children(s);
    pop_current();
    if (dir_ == Direction::Forward) {
        pending_.push_back(b);
        pending_.push_back(a);
    } else {
        pending_.push_back(a);
        pending_.push_back(b);
    }
    ++examined_;
}

}  // namespace gract
