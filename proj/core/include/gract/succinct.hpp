#pragma once

// Compact static primitives: rank/select bitmaps, fixed-width packed integer
// arrays, Directly Addressable Codes and permutations with sampled inverses.
//
// Positions in the rank/select contract are 1-based: rank(b, p) counts the
// occurrences of b among B[1..p], and select(b, n) returns the 1-based position
// of the n-th b. Everything is immutable once built.

#include <cstdint>
#include <span>
#include <vector>

#include "gract/serialize.hpp"

namespace gract {

/// Number of bits needed to write v in binary (at least 1).
[[nodiscard]] constexpr unsigned bit_width_of(std::uint64_t v) {
    unsigned w = 1;
    while (w < 64 && (v >> w) != 0) ++w;
    return w;
}

class BitVectorBuilder;

/// Static bitmap with a two-level rank directory (one 64-bit counter per 2048
/// bits plus one 16-bit counter per 512 bits, i.e. 6.25% overhead).
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(const std::vector<bool>& bits);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool empty() const { return size_ == 0; }

    /// 0-based bit access.
    [[nodiscard]] bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    [[nodiscard]] bool access(std::size_t i) const;

    /// Occurrences of `bit` among the first p bits (1-based B[1..p]); p <= size().
    [[nodiscard]] std::size_t rank(bool bit, std::size_t p) const;
    [[nodiscard]] std::size_t rank1(std::size_t p) const;
    [[nodiscard]] std::size_t rank0(std::size_t p) const { return p - rank1(p); }

    /// 1-based position of the n-th occurrence of `bit`; throws std::out_of_range.
    [[nodiscard]] std::size_t select(bool bit, std::size_t n) const;
    [[nodiscard]] std::size_t select1(std::size_t n) const { return select(true, n); }
    [[nodiscard]] std::size_t select0(std::size_t n) const { return select(false, n); }

    [[nodiscard]] std::size_t count_ones() const { return size_ == 0 ? 0 : rank1(size_); }

    /// Payload plus directory bytes.
    [[nodiscard]] std::size_t size_in_bytes() const;
    [[nodiscard]] std::size_t directory_bytes() const;

    void serialize(ByteWriter& out) const;
    static BitVector deserialize(ByteReader& in);

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

private:
    friend class BitVectorBuilder;
    void build_directory();

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    std::vector<std::uint64_t> super_;   // ones before each 2048-bit superblock
    std::vector<std::uint16_t> blocks_;  // ones since superblock start, per 512-bit block
};

/// Append-only construction helper for BitVector.
class BitVectorBuilder {
public:
    BitVectorBuilder() = default;
    explicit BitVectorBuilder(std::size_t reserve_bits) { words_.reserve((reserve_bits + 63) / 64); }

    void push_back(bool bit) {
        if ((size_ & 63) == 0) words_.push_back(0);
        if (bit) words_.back() |= std::uint64_t{1} << (size_ & 63);
        ++size_;
    }
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] BitVector build() &&;

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/// Fixed-width bit-packed unsigned integer array.
class IntVector {
public:
    IntVector() = default;
    IntVector(std::size_t n, unsigned width);
    /// Packs `values` using the smallest width that fits the maximum.
    static IntVector from_values(std::span<const std::uint64_t> values);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] unsigned width() const { return width_; }
    [[nodiscard]] std::uint64_t operator[](std::size_t i) const { return get(i); }
    [[nodiscard]] std::uint64_t get(std::size_t i) const;
    void set(std::size_t i, std::uint64_t v);
    [[nodiscard]] std::size_t size_in_bytes() const { return words_.size() * 8 + 16; }

    void serialize(ByteWriter& out) const;
    static IntVector deserialize(ByteReader& in);

    friend bool operator==(const IntVector&, const IntVector&) = default;

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    unsigned width_ = 1;
};

/// Chunk policy for DacSequence construction.
struct DacConfig {
    enum class Mode { Optimal, Fixed };
    Mode mode = Mode::Optimal;
    unsigned chunk_width = 8;  // Fixed mode only
    unsigned max_levels = 0;   // Fixed mode only; 0 = unlimited

    static DacConfig optimal() { return {}; }
    static DacConfig fixed(unsigned width, unsigned levels) { return {Mode::Fixed, width, levels}; }
};

/// Directly Addressable Codes: each value is split into chunks of n_1, n_2, ...
/// bits stored level by level; a continuation bitmap per level marks values
/// that need another chunk, and rank on it locates that chunk one level down.
class DacSequence {
public:
    DacSequence() = default;
    static DacSequence build(std::span<const std::uint64_t> values, DacConfig config = DacConfig::optimal());

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::uint64_t access(std::size_t i) const;
    [[nodiscard]] std::uint64_t operator[](std::size_t i) const { return access(i); }

    [[nodiscard]] std::size_t levels() const { return chunks_.size(); }
    [[nodiscard]] unsigned level_width(std::size_t l) const { return chunks_[l].width(); }
    /// Entries stored at each level, top level first.
    [[nodiscard]] std::size_t level_count(std::size_t l) const { return chunks_[l].size(); }
    [[nodiscard]] const BitVector& continuation(std::size_t l) const { return more_[l]; }
    [[nodiscard]] std::size_t size_in_bytes() const;

    void serialize(ByteWriter& out) const;
    static DacSequence deserialize(ByteReader& in);

    friend bool operator==(const DacSequence&, const DacSequence&) = default;

    /// Level widths chosen by the space-minimizing dynamic program over the
    /// bit-length histogram (exposed for testing).
    static std::vector<unsigned> optimal_widths(std::span<const std::uint64_t> values);

private:
    std::size_t size_ = 0;
    std::vector<IntVector> chunks_;
    std::vector<BitVector> more_;  // one per level except the last
};

/// Permutation of [1..n] with forward array and sampled back-pointers on its
/// cycles, answering inverse queries in O(sample_rate) steps with (1+1/t)n cells.
class Permutation {
public:
    static constexpr unsigned kDefaultSampleRate = 5;

    Permutation() = default;
    /// `forward` holds pi(1..n) as 1-based values.
    explicit Permutation(std::span<const std::uint64_t> forward, unsigned sample_rate = kDefaultSampleRate);

    [[nodiscard]] std::size_t size() const { return forward_.size(); }
    [[nodiscard]] unsigned sample_rate() const { return sample_rate_; }

    /// pi(i) for 1 <= i <= n.
    [[nodiscard]] std::uint64_t pi(std::size_t i) const;
    /// The unique i with pi(i) = j, for 1 <= j <= n.
    [[nodiscard]] std::uint64_t pi_inv(std::uint64_t j) const;

    [[nodiscard]] std::size_t size_in_bytes() const;

    void serialize(ByteWriter& out) const;
    static Permutation deserialize(ByteReader& in);

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    IntVector forward_;  // 0-based values
    BitVector sampled_;
    IntVector back_;     // back-pointer of each sampled position, 0-based
    unsigned sample_rate_ = kDefaultSampleRate;
};

}  // namespace gract
