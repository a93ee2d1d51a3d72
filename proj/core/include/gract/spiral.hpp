#pragma once

// Bijection between 2-D displacements and non-negative integers along a
// clockwise square spiral around the origin:
//
//   6 7 8
//   5 0 1 9
//   4 3 2 10 ...
//
// Ring r >= 1 holds codes [(2r-1)^2, (2r+1)^2). It is entered at (r, r-1),
// runs south along the east edge, west along the south edge, north along the
// west edge and east along the north edge, ending at the corner (r, r).

#include <cstdint>

#include "gract/types.hpp"

namespace gract::spiral {

using Code = std::uint64_t;

inline constexpr std::int64_t kDefaultRadiusBound = std::int64_t{1} << 30;

/// Ring index of a displacement: max(|dx|, |dy|).
[[nodiscard]] std::int64_t ring_of(const Displacement& d);

/// Throws std::out_of_range if max(|dx|,|dy|) exceeds `radius_bound`.
[[nodiscard]] Code encode(const Displacement& d, std::int64_t radius_bound = kDefaultRadiusBound);

/// Closed-form inverse of encode.
[[nodiscard]] Displacement decode(Code code);

}  // namespace gract::spiral
