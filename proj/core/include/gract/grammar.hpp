#pragma once

// Re-Pair grammar compression over the log alphabet, and the enriched rule
// dictionary (time span, net displacement and relative MBR per rule).
//
// Alphabet: values 0..3 are the event codewords, a movement with spiral code
// m is stored as m + 4, and values >= terminal_boundary are nonterminals
// (rule id = value - terminal_boundary).

#include <cstdint>
#include <utility>
#include <vector>

#include "gract/spiral.hpp"
#include "gract/succinct.hpp"
#include "gract/types.hpp"

namespace gract {

enum class EventKind : std::uint8_t {
    Disappear = 0,       // D: gone until at least the next snapshot
    AbsoluteAppear = 1,  // AA: (re)appears, absolute instant and position
    RelativeNoMove = 2,  // RNM: short gap, reappears in place
    RelativeMove = 3,    // RM: short gap, reappears displaced
};

inline constexpr std::uint64_t kEventSymbols = 4;

struct Symbol {
    std::uint64_t value = 0;

    friend constexpr bool operator==(const Symbol&, const Symbol&) = default;
    friend constexpr auto operator<=>(const Symbol&, const Symbol&) = default;

    [[nodiscard]] constexpr bool is_event() const { return value < kEventSymbols; }
    [[nodiscard]] constexpr EventKind event() const { return static_cast<EventKind>(value); }

    static constexpr Symbol move(spiral::Code code) { return {code + kEventSymbols}; }
    static constexpr Symbol of(EventKind e) { return {static_cast<std::uint64_t>(e)}; }
};

/// Output of repair_compress: compressed streams plus the bare rule pairs.
struct RePairResult {
    std::vector<std::vector<std::uint64_t>> streams;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rules;
    std::uint64_t terminal_boundary = 0;
};

/// Re-Pair over a set of streams. Repeatedly replaces the most frequent pair
/// (non-overlapping left-to-right occurrences; ties by smallest (a, b)) with
/// a new nonterminal until no pair occurs twice. Event symbols never pair and
/// no pair straddles two streams. All input symbols must be < terminal_boundary.
[[nodiscard]] RePairResult repair_compress(const std::vector<std::vector<std::uint64_t>>& streams,
                                           std::uint64_t terminal_boundary);

/// Re-Pair rule s -> a b enriched with the instants it covers, its net
/// displacement and the box of all positions visited from origin (0,0).
struct EnrichedRule {
    Symbol left;
    Symbol right;
    Instant span = 0;
    Displacement disp;
    Region mbr;

    friend bool operator==(const EnrichedRule&, const EnrichedRule&) = default;
};

/// Immutable rule dictionary. Pairs are bit-packed; spans live in one DAC and
/// the zigzag-mapped (disp, mbr) coordinates of every rule in another.
class RuleDictionary {
public:
    RuleDictionary() = default;

    /// Computes span/displacement/MBR bottom-up. Rules must reference only
    /// terminals or lower rule ids; throws std::logic_error on an event symbol.
    static RuleDictionary enrich(std::uint64_t terminal_boundary,
                                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rules);

    [[nodiscard]] std::uint64_t terminal_boundary() const { return terminal_boundary_; }
    [[nodiscard]] std::size_t rule_count() const { return rule_count_; }
    [[nodiscard]] unsigned depth() const { return depth_; }

    [[nodiscard]] bool is_rule(Symbol s) const { return s.value >= terminal_boundary_; }
    [[nodiscard]] bool is_move(Symbol s) const { return !s.is_event() && !is_rule(s); }

    [[nodiscard]] std::pair<Symbol, Symbol> children(Symbol rule) const;
    [[nodiscard]] EnrichedRule rule(std::size_t id) const;

    /// Instants covered (1 for a movement).
    [[nodiscard]] Instant span(Symbol s) const;
    [[nodiscard]] Displacement displacement(Symbol s) const;
    /// Relative MBR, always containing (0,0) and the displacement.
    [[nodiscard]] Region mbr(Symbol s) const;

    /// Full left-to-right expansion into spiral codes.
    [[nodiscard]] std::vector<spiral::Code> expand(Symbol s) const;

    [[nodiscard]] std::size_t size_in_bytes() const;

    void serialize(ByteWriter& out) const;
    static RuleDictionary deserialize(ByteReader& in);

    friend bool operator==(const RuleDictionary& a, const RuleDictionary& b) {
        return a.terminal_boundary_ == b.terminal_boundary_ && a.rule_count_ == b.rule_count_ &&
               a.pairs_ == b.pairs_ && a.spans_ == b.spans_ && a.coords_ == b.coords_;
    }

private:
    void check_symbol(Symbol s) const;
    void compute_depth();

    std::uint64_t terminal_boundary_ = kEventSymbols;
    std::size_t rule_count_ = 0;
    IntVector pairs_;      // left, right interleaved
    DacSequence spans_;
    DacSequence coords_;   // dx, dy, x1, y1, x2, y2 per rule, zigzag-mapped
    unsigned depth_ = 0;
};

[[nodiscard]] constexpr std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
[[nodiscard]] constexpr std::int64_t unzigzag(std::uint64_t v) {
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

}  // namespace gract
