#include "gract/succinct.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace gract {

namespace {

constexpr std::size_t kBlockBits = 512;
constexpr std::size_t kSuperBits = 2048;
constexpr std::size_t kBlocksPerSuper = kSuperBits / kBlockBits;

std::uint64_t low_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Position (0-based) of the n-th (1-based) set bit of w.
unsigned select_in_word(std::uint64_t w, unsigned n) {
    for (unsigned i = 1; i < n; ++i) w &= w - 1;
    return static_cast<unsigned>(std::countr_zero(w));
}

}  // namespace

// ---------------------------------------------------------------- BitVector

BitVector::BitVector(const std::vector<bool>& bits) {
    BitVectorBuilder b(bits.size());
    for (bool bit : bits) b.push_back(bit);
    *this = std::move(b).build();
}

BitVector BitVectorBuilder::build() && {
    BitVector bv;
    bv.words_ = std::move(words_);
    bv.size_ = size_;
    bv.build_directory();
    return bv;
}

void BitVector::build_directory() {
    const std::size_t nblocks = size_ / kBlockBits + 1;
    const std::size_t nsuper = size_ / kSuperBits + 1;
    super_.assign(nsuper, 0);
    blocks_.assign(nblocks, 0);
    std::uint64_t total = 0;
    std::uint64_t in_super = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        if (b % kBlocksPerSuper == 0) {
            super_[b / kBlocksPerSuper] = total;
            in_super = 0;
        }
        blocks_[b] = static_cast<std::uint16_t>(in_super);
        for (std::size_t w = b * 8; w < b * 8 + 8 && w < words_.size(); ++w) {
            const auto c = static_cast<std::uint64_t>(std::popcount(words_[w]));
            total += c;
            in_super += c;
        }
    }
}

bool BitVector::access(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("BitVector::access: index " + std::to_string(i));
    return (*this)[i];
}

std::size_t BitVector::rank1(std::size_t p) const {
    if (p > size_) throw std::out_of_range("BitVector::rank: position " + std::to_string(p));
    const std::size_t b = p / kBlockBits;
    std::size_t r = super_[p / kSuperBits] + blocks_[b];
    const std::size_t end = p >> 6;
    for (std::size_t w = b * 8; w < end; ++w) r += static_cast<std::size_t>(std::popcount(words_[w]));
    if (p & 63) r += static_cast<std::size_t>(std::popcount(words_[end] & low_mask(p & 63)));
    return r;
}

std::size_t BitVector::rank(bool bit, std::size_t p) const { return bit ? rank1(p) : rank0(p); }

std::size_t BitVector::select(bool bit, std::size_t n) const {
    const std::size_t ones = count_ones();
    const std::size_t total = bit ? ones : size_ - ones;
    if (n == 0 || n > total) {
        throw std::out_of_range("BitVector::select: ordinal " + std::to_string(n) + " of " + std::to_string(total));
    }
    auto before_super = [&](std::size_t s) -> std::size_t {
        return bit ? super_[s] : s * kSuperBits - super_[s];
    };
    auto before_block = [&](std::size_t b) -> std::size_t {
        const std::size_t ones_before = super_[b / kBlocksPerSuper] + blocks_[b];
        return bit ? ones_before : b * kBlockBits - ones_before;
    };

    // Last superblock whose preceding count is < n.
    std::size_t lo = 0;
    std::size_t hi = super_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (before_super(mid) < n) lo = mid; else hi = mid;
    }
    std::size_t blk = lo * kBlocksPerSuper;
    const std::size_t blk_end = std::min(blk + kBlocksPerSuper, blocks_.size());
    while (blk + 1 < blk_end && before_block(blk + 1) < n) ++blk;

    std::size_t remaining = n - before_block(blk);
    for (std::size_t w = blk * 8; w < words_.size(); ++w) {
        const std::uint64_t word = bit ? words_[w] : ~words_[w];
        const auto c = static_cast<std::size_t>(std::popcount(word));
        if (remaining <= c) return w * 64 + select_in_word(word, static_cast<unsigned>(remaining)) + 1;
        remaining -= c;
    }
    throw std::logic_error("BitVector::select: directory inconsistent");
}

std::size_t BitVector::directory_bytes() const { return super_.size() * 8 + blocks_.size() * 2; }

std::size_t BitVector::size_in_bytes() const { return words_.size() * 8 + directory_bytes() + 8; }

void BitVector::serialize(ByteWriter& out) const {
    out.u64(size_);
    for (auto w : words_) out.u64(w);
}

BitVector BitVector::deserialize(ByteReader& in) {
    BitVector bv;
    bv.size_ = in.u64();
    const std::size_t nwords = (bv.size_ + 63) / 64;
    if (nwords > in.remaining() / 8) throw FormatError("bitmap length exceeds input");
    bv.words_.resize(nwords);
    for (auto& w : bv.words_) w = in.u64();
    if (bv.size_ & 63) {
        if (bv.words_.back() & ~low_mask(bv.size_ & 63)) throw FormatError("bitmap padding bits set");
    }
    bv.build_directory();
    return bv;
}

// ---------------------------------------------------------------- IntVector

IntVector::IntVector(std::size_t n, unsigned width) : size_(n), width_(width) {
    if (width == 0 || width > 64) throw std::invalid_argument("IntVector: width must be in [1,64]");
    words_.assign((n * width + 63) / 64, 0);
}

IntVector IntVector::from_values(std::span<const std::uint64_t> values) {
    std::uint64_t mx = 0;
    for (auto v : values) mx = std::max(mx, v);
    IntVector iv(values.size(), bit_width_of(mx));
    for (std::size_t i = 0; i < values.size(); ++i) iv.set(i, values[i]);
    return iv;
}

std::uint64_t IntVector::get(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("IntVector::get: index " + std::to_string(i));
    const std::size_t bit = i * width_;
    const std::size_t w = bit >> 6;
    const unsigned off = bit & 63;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & low_mask(width_);
}

void IntVector::set(std::size_t i, std::uint64_t v) {
    if (i >= size_) throw std::out_of_range("IntVector::set: index " + std::to_string(i));
    if (width_ < 64 && (v >> width_) != 0) throw std::invalid_argument("IntVector::set: value exceeds width");
    const std::size_t bit = i * width_;
    const std::size_t w = bit >> 6;
    const unsigned off = bit & 63;
    const std::uint64_t mask = low_mask(width_);
    words_[w] = (words_[w] & ~(mask << off)) | (v << off);
    if (off + width_ > 64) {
        const unsigned spill = off + width_ - 64;
        words_[w + 1] = (words_[w + 1] & ~low_mask(spill)) | (v >> (64 - off));
    }
}

void IntVector::serialize(ByteWriter& out) const {
    out.u64(size_);
    out.u8(static_cast<std::uint8_t>(width_));
    for (auto w : words_) out.u64(w);
}

IntVector IntVector::deserialize(ByteReader& in) {
    const auto n = in.u64();
    const unsigned width = in.u8();
    if (width == 0 || width > 64) throw FormatError("packed array width out of range");
    if (n > (in.remaining() * 8) / width + 64) throw FormatError("packed array length exceeds input");
    IntVector iv(n, width);
    for (auto& w : iv.words_) w = in.u64();
    return iv;
}

// ---------------------------------------------------------------- DacSequence

std::vector<unsigned> DacSequence::optimal_widths(std::span<const std::uint64_t> values) {
    if (values.empty()) return {};
    unsigned max_len = 1;
    std::vector<std::uint64_t> hist(65, 0);
    for (auto v : values) {
        const unsigned len = bit_width_of(v);
        ++hist[len];
        max_len = std::max(max_len, len);
    }
    // longer[b] = number of values whose bit length exceeds b.
    std::vector<std::uint64_t> longer(max_len + 1, 0);
    longer[0] = values.size();
    for (unsigned b = 1; b <= max_len; ++b) longer[b] = longer[b - 1] - hist[b];

    // best[b]: minimum bits to store every value's bits above position b.
    std::vector<std::uint64_t> best(max_len + 1, 0);
    std::vector<unsigned> next(max_len + 1, max_len);
    for (int b = static_cast<int>(max_len) - 1; b >= 0; --b) {
        std::uint64_t best_cost = ~std::uint64_t{0};
        for (unsigned nb = max_len; nb > static_cast<unsigned>(b); --nb) {
            const std::uint64_t chunk = longer[b] * (nb - b);
            const std::uint64_t flags = nb < max_len ? longer[b] : 0;
            const std::uint64_t cost = chunk + flags + best[nb];
            if (cost < best_cost) {
                best_cost = cost;
                next[b] = nb;
            }
        }
        best[b] = best_cost;
    }
    std::vector<unsigned> widths;
    for (unsigned b = 0; b < max_len; b = next[b]) widths.push_back(next[b] - b);
    return widths;
}

DacSequence DacSequence::build(std::span<const std::uint64_t> values, DacConfig config) {
    DacSequence d;
    d.size_ = values.size();
    if (values.empty()) return d;

    std::vector<unsigned> widths;
    if (config.mode == DacConfig::Mode::Optimal) {
        widths = optimal_widths(values);
    } else {
        if (config.chunk_width == 0) throw std::invalid_argument("DacConfig: chunk width must be positive");
        unsigned max_len = 1;
        for (auto v : values) max_len = std::max(max_len, bit_width_of(v));
        unsigned needed = (max_len + config.chunk_width - 1) / config.chunk_width;
        if (config.max_levels > 0) needed = std::min(needed, config.max_levels);
        for (unsigned l = 0; l + 1 < needed; ++l) widths.push_back(config.chunk_width);
        widths.push_back(max_len - config.chunk_width * (needed - 1));
    }

    std::vector<std::uint64_t> level(values.begin(), values.end());
    for (std::size_t l = 0; l < widths.size(); ++l) {
        const unsigned w = widths[l];
        const bool last = l + 1 == widths.size();
        IntVector chunk(level.size(), w);
        BitVectorBuilder more(last ? 0 : level.size());
        std::vector<std::uint64_t> rest;
        for (std::size_t i = 0; i < level.size(); ++i) {
            chunk.set(i, level[i] & low_mask(w));
            if (!last) {
                const std::uint64_t hi = w >= 64 ? 0 : level[i] >> w;
                more.push_back(hi != 0);
                if (hi != 0) rest.push_back(hi);
            }
        }
        d.chunks_.push_back(std::move(chunk));
        if (!last) d.more_.push_back(std::move(more).build());
        level = std::move(rest);
        if (level.empty() && !last) {
            // Remaining levels would be empty; trim them.
            d.more_.pop_back();
            break;
        }
    }
    return d;
}

std::uint64_t DacSequence::access(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("DacSequence::access: index " + std::to_string(i));
    std::uint64_t value = 0;
    unsigned shift = 0;
    std::size_t idx = i;
    for (std::size_t l = 0; l < chunks_.size(); ++l) {
        value |= chunks_[l][idx] << shift;
        if (l >= more_.size() || !more_[l][idx]) break;
        shift += chunks_[l].width();
        idx = more_[l].rank1(idx);
    }
    return value;
}

std::size_t DacSequence::size_in_bytes() const {
    std::size_t bytes = 8;
    for (const auto& c : chunks_) bytes += c.size_in_bytes();
    for (const auto& m : more_) bytes += m.size_in_bytes();
    return bytes;
}

void DacSequence::serialize(ByteWriter& out) const {
    out.u64(size_);
    out.u8(static_cast<std::uint8_t>(chunks_.size()));
    for (const auto& c : chunks_) c.serialize(out);
    for (const auto& m : more_) m.serialize(out);
}

DacSequence DacSequence::deserialize(ByteReader& in) {
    DacSequence d;
    d.size_ = in.u64();
    const unsigned nlevels = in.u8();
    if (nlevels > 64) throw FormatError("DAC level count out of range");
    for (unsigned l = 0; l < nlevels; ++l) d.chunks_.push_back(IntVector::deserialize(in));
    for (unsigned l = 0; l + 1 < nlevels; ++l) d.more_.push_back(BitVector::deserialize(in));
    if (nlevels > 0 && d.chunks_[0].size() != d.size_) throw FormatError("DAC top level size mismatch");
    for (unsigned l = 0; l + 1 < nlevels; ++l) {
        if (d.more_[l].size() != d.chunks_[l].size() || d.more_[l].count_ones() != d.chunks_[l + 1].size()) {
            throw FormatError("DAC level sizes inconsistent");
        }
    }
    return d;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::span<const std::uint64_t> forward, unsigned sample_rate)
    : sample_rate_(sample_rate) {
    if (sample_rate == 0) throw std::invalid_argument("Permutation: sample rate must be positive");
    const std::size_t n = forward.size();
    std::vector<std::uint64_t> fwd(n);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (forward[i] < 1 || forward[i] > n || seen[forward[i] - 1]) {
            throw std::invalid_argument("Permutation: input is not a permutation of [1..n]");
        }
        seen[forward[i] - 1] = true;
        fwd[i] = forward[i] - 1;
    }
    forward_ = IntVector::from_values(fwd);

    std::vector<bool> sampled(n, false);
    std::vector<std::uint64_t> back_of(n, 0);
    std::vector<bool> visited(n, false);
    std::vector<std::uint64_t> cycle;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        cycle.clear();
        for (std::uint64_t c = start; !visited[c]; c = fwd[c]) {
            visited[c] = true;
            cycle.push_back(c);
        }
        if (cycle.size() <= sample_rate) continue;
        // Sample every t-th element; each points t steps back along the cycle,
        // and the first one points to the last sample.
        std::size_t last = 0;
        for (std::size_t k = 0; k < cycle.size(); k += sample_rate) last = k;
        for (std::size_t k = 0; k < cycle.size(); k += sample_rate) {
            sampled[cycle[k]] = true;
            back_of[cycle[k]] = k == 0 ? cycle[last] : cycle[k - sample_rate];
        }
    }
    BitVectorBuilder sb(n);
    std::vector<std::uint64_t> backs;
    for (std::size_t i = 0; i < n; ++i) {
        sb.push_back(sampled[i]);
        if (sampled[i]) backs.push_back(back_of[i]);
    }
    sampled_ = std::move(sb).build();
    back_ = IntVector::from_values(backs);
}

std::uint64_t Permutation::pi(std::size_t i) const {
    if (i < 1 || i > size()) throw std::out_of_range("Permutation::pi: index " + std::to_string(i));
    return forward_[i - 1] + 1;
}

std::uint64_t Permutation::pi_inv(std::uint64_t j) const {
    if (j < 1 || j > size()) throw std::out_of_range("Permutation::pi_inv: value " + std::to_string(j));
    const std::uint64_t target = j - 1;
    std::uint64_t i = target;
    bool jumped = false;
    while (forward_[i] != target) {
        if (!jumped && sampled_[i]) {
            i = back_[sampled_.rank1(i)];
            jumped = true;
        } else {
            i = forward_[i];
        }
    }
    return i + 1;
}

std::size_t Permutation::size_in_bytes() const {
    return forward_.size_in_bytes() + sampled_.size_in_bytes() + back_.size_in_bytes() + 1;
}

void Permutation::serialize(ByteWriter& out) const {
    out.u8(static_cast<std::uint8_t>(sample_rate_));
    forward_.serialize(out);
    sampled_.serialize(out);
    back_.serialize(out);
}

Permutation Permutation::deserialize(ByteReader& in) {
    Permutation p;
    p.sample_rate_ = in.u8();
    if (p.sample_rate_ == 0) throw FormatError("permutation sample rate is zero");
    p.forward_ = IntVector::deserialize(in);
    p.sampled_ = BitVector::deserialize(in);
    p.back_ = IntVector::deserialize(in);
    if (p.sampled_.size() != p.forward_.size() || p.sampled_.count_ones() != p.back_.size()) {
        throw FormatError("permutation sections inconsistent");
    }
    for (std::size_t i = 0; i < p.forward_.size(); ++i) {
        if (p.forward_[i] >= p.forward_.size()) throw FormatError("permutation value out of range");
    }
    return p;
}

}  // namespace gract
