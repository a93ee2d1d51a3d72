#include "gract/spiral.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace gract::spiral {

namespace {

std::uint64_t isqrt(std::uint64_t v) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

}  // namespace

std::int64_t ring_of(const Displacement& d) { return std::max(std::llabs(d.dx), std::llabs(d.dy)); }

Code encode(const Displacement& d, std::int64_t radius_bound) {
    const std::int64_t r = ring_of(d);
    if (r > radius_bound) throw std::out_of_range("spiral::encode: displacement beyond radius bound");
    if (r == 0) return 0;
    const auto side = static_cast<std::uint64_t>(2 * r);
    const Code base = (side - 1) * (side - 1);
    std::uint64_t offset;
    if (d.dx == r && d.dy < r) {
        offset = static_cast<std::uint64_t>(r - 1 - d.dy);
    } else if (d.dy == -r && d.dx < r) {
        offset = side + static_cast<std::uint64_t>(r - 1 - d.dx);
    } else if (d.dx == -r) {
        offset = 2 * side + static_cast<std::uint64_t>(d.dy + r - 1);
    } else {
        offset = 3 * side + static_cast<std::uint64_t>(d.dx + r - 1);
    }
    return base + offset;
}

Displacement decode(Code code) {
    if (code == 0) return {0, 0};
    const std::uint64_t s = isqrt(code);
    const auto r = static_cast<std::int64_t>((s + 1) / 2);
    const auto side = static_cast<std::uint64_t>(2 * r);
    const std::uint64_t offset = code - (side - 1) * (side - 1);
    const auto pos = static_cast<std::int64_t>(offset % side);
    switch (offset / side) {
        case 0: return {r, r - 1 - pos};
        case 1: return {r - 1 - pos, -r};
        case 2: return {-r, -r + 1 + pos};
        default: return {-r + 1 + pos, r};
    }
}

}  // namespace gract::spiral
