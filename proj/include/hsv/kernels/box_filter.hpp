#pragma once

#include <array>
#include <span>
#include <vector>

#include "hsv/core/volume4d.hpp"

namespace hsv::kernels {

/// Half-widths of a centred box window per axis (t, x, y, z). Window length is 2h + 1.
using HalfWidths = std::array<std::uint32_t, 4>;

/// Number of in-grid samples covered by the clipped window centred at `i` on an axis of length n.
inline std::uint32_t clipped_length(std::uint32_t i, std::uint32_t n, std::uint32_t h) noexcept {
    const std::uint32_t lo = i >= h ? i - h : 0;
    const std::uint32_t hi = i + h < n ? i + h : n - 1;
    return hi - lo + 1;
}

}  // namespace hsv::kernels

// Separable clipped box sum: out(p) = sum of in(q) over the window centred at p,
// truncated at the grid boundary. Axes are filtered in the order z, y, x, t;
// each line is summed directly (no running sums).

namespace hsv::kernels::serial {
std::vector<double> box_sum(std::span<const double> in, Dims4 dims, HalfWidths half);
}

namespace hsv::kernels::parallel {
std::vector<double> box_sum(std::span<const double> in, Dims4 dims, HalfWidths half);
}
