#pragma once

// Per-portion object logs: the relative movements of one object between two
// consecutive snapshots, as a grammar-compressed symbol sequence plus side
// arrays with the integer arguments of its events.
//
// Event arguments, one D value per event:
//   AA  first symbol only  D = absolute instant, P = x, y
//   RM                     D = instants missing, P = spiral code of the jump
//   RNM                    D = instants missing
//   D   last symbol only   D = last instant seen, P = x, y of last position

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gract/grammar.hpp"
#include "gract/succinct.hpp"
#include "gract/types.hpp"

namespace gract {

/// Uncompressed log of one object for one portion.
struct RawLog {
    std::vector<std::uint64_t> symbols;
    std::vector<std::uint64_t> d_values;
    std::vector<std::uint64_t> p_values;

    friend bool operator==(const RawLog&, const RawLog&) = default;
};

/// Encodes one portion. positions[i] is the cell at instant start + i, or
/// nullopt if the object is not reported; positions[0] is the snapshot instant.
[[nodiscard]] RawLog encode_log(std::span<const std::optional<Cell>> positions, Instant start);

/// Inverse of encode_log, for checking: reconstructs positions over
/// [start, start + length) from the starting snapshot cell (if any).
[[nodiscard]] std::vector<std::optional<Cell>> decode_raw_log(const RawLog& log, std::optional<Cell> first,
                                                              Instant start, std::size_t length);

struct LogStoreStats {
    std::size_t raw_symbols = 0;
    std::size_t compressed_symbols = 0;
    std::size_t events = 0;
    std::size_t symbol_bytes = 0;
    std::size_t offset_bytes = 0;
    std::size_t event_bytes = 0;
    std::size_t dictionary_bytes = 0;
};

/// All logs of all portions, sharing one Re-Pair dictionary. Logs are indexed
/// (portion, object); objects that never appear in a portion have empty logs.
class LogStore {
public:
    LogStore() = default;

    /// `logs` is portion-major: logs[h * objects + o].
    static LogStore build(const std::vector<RawLog>& logs, std::size_t portions, std::size_t objects);

    [[nodiscard]] std::size_t portions() const { return portions_; }
    [[nodiscard]] std::size_t objects() const { return objects_; }
    [[nodiscard]] const RuleDictionary& dictionary() const { return dict_; }

    [[nodiscard]] std::size_t length(std::size_t h, ObjectId o) const;
    [[nodiscard]] Symbol symbol(std::size_t h, ObjectId o, std::size_t i) const;
    [[nodiscard]] std::size_t event_count(std::size_t h, ObjectId o) const;
    [[nodiscard]] std::uint64_t d_value(std::size_t h, ObjectId o, std::size_t k) const;
    [[nodiscard]] std::size_t p_count(std::size_t h, ObjectId o) const;
    [[nodiscard]] std::uint64_t p_value(std::size_t h, ObjectId o, std::size_t k) const;

    [[nodiscard]] bool starts_with_appear(std::size_t h, ObjectId o) const;
    [[nodiscard]] bool ends_with_disappear(std::size_t h, ObjectId o) const;

    /// Fully expanded terminal sequence of one log (events kept in place).
    [[nodiscard]] RawLog raw(std::size_t h, ObjectId o) const;

    [[nodiscard]] LogStoreStats stats() const;
    [[nodiscard]] std::size_t size_in_bytes() const;

    /// Writes everything but the dictionary, which is serialized separately.
    void serialize(ByteWriter& out) const;
    static LogStore deserialize(ByteReader& in, RuleDictionary dictionary);

    friend bool operator==(const LogStore&, const LogStore&) = default;

private:
    [[nodiscard]] std::size_t slot(std::size_t h, ObjectId o) const;

    std::size_t portions_ = 0;
    std::size_t objects_ = 0;
    std::size_t raw_symbols_ = 0;
    RuleDictionary dict_;
    IntVector symbols_;         // concatenated compressed logs
    IntVector symbol_offsets_;  // portions * objects + 1
    IntVector d_offsets_;       // portions * objects + 1, global
    IntVector p_offsets_;
    std::vector<DacSequence> d_values_;  // one per portion
    std::vector<DacSequence> p_values_;
};

struct TimedCell {
    Instant t = 0;
    Cell cell;

    friend constexpr bool operator==(const TimedCell&, const TimedCell&) = default;
};

/// Applies movement symbol m from (t_c, p_c), stopping at limit: the whole
/// symbol when t_c + span(m) <= limit, else only its prefix up to limit.
/// Throws std::invalid_argument for event symbols.
[[nodiscard]] TimedCell move_jump(const RuleDictionary& dict, Cell p_c, Instant t_c, Instant limit, Symbol m);
/// Undoes movement symbol m that ends at (t_c, p_c), stopping at floor.
[[nodiscard]] TimedCell reverse_move_jump(const RuleDictionary& dict, Cell p_c, Instant floor, Instant t_c, Symbol m);
/// Every intermediate (instant, cell) of applying m from (t_c, p_c), up to limit.
[[nodiscard]] std::vector<TimedCell> move_steps(const RuleDictionary& dict, Cell p_c, Instant t_c, Instant limit,
                                                Symbol m);

enum class Direction : std::uint8_t { Forward, Backward };

/// Where a walk stands: the last instant accounted for, the object's cell at
/// that instant, and whether it is reported there.
struct WalkState {
    Instant t = 0;
    Cell pos;
    bool present = false;

    friend bool operator==(const WalkState&, const WalkState&) = default;
};

/// Walks one log in either direction with an explicit stack, so a rule can be
/// skipped whole (advance) or opened into its two children (descend).
/// Backward walks start from the following snapshot and undo each symbol.
class LogWalker {
public:
    LogWalker(const LogStore& store, std::size_t portion, ObjectId object, Direction dir, WalkState start);

    [[nodiscard]] bool done() const { return pending_.empty() && next_top_ == end_top_; }
    [[nodiscard]] Symbol current() const;
    [[nodiscard]] const WalkState& state() const { return state_; }
    [[nodiscard]] Direction direction() const { return dir_; }

    /// The state after consuming the current symbol whole.
    [[nodiscard]] WalkState after() const;
    /// D argument of the current symbol, which must be a top-level event.
    [[nodiscard]] std::uint64_t event_argument() const;
    void advance();
    /// Replaces the current rule by its children in walk order.
    void descend();

    [[nodiscard]] std::size_t symbols_examined() const { return examined_; }

private:
    void pop_current();

    const LogStore* store_;
    const RuleDictionary* dict_;
    std::size_t portion_;
    ObjectId object_;
    Direction dir_;
    WalkState state_;
    std::vector<Symbol> pending_;  // opened rule children, top is current
    std::size_t next_top_;         // forward: next index; backward: one past it
    std::size_t end_top_;
    std::size_t d_cursor_;
    std::size_t p_cursor_;
    std::size_t examined_ = 0;
};

}  // namespace gract
