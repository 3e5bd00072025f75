#pragma once

#include <cstdint>
#include <vector>

#include "hsv/core/volume4d.hpp"

namespace hsv::kernels {

struct Tap {
    std::uint32_t index;  // row-major table: in-plane column x*Y + y; transposed: detector row u
    double weight;
};

/// Sparse in-plane weights of the rotate-and-sum projector for one angle.
///
/// Detector row u collects, for every beam sample s along x, the bilinear
/// weights of the rotated sample point (x, y) scaled by `step`. Taps landing on
/// the same in-plane column are merged. Every z slice shares the same table,
/// so detector pixel (u, v) reads only slice z = v.
///
/// `transposed` holds the same weights grouped by in-plane column, with rows
/// listed in increasing u; gather-form backprojection over it reproduces the
/// scatter-form sum order exactly.
struct RotationTable {
    Dims3 dims;
    double angle_deg = 0.0;
    double step = 1.0;

    std::vector<std::uint32_t> row_offsets;  // size Y + 1
    std::vector<Tap> row_taps;
    std::vector<std::uint32_t> column_offsets;  // size X*Y + 1
    std::vector<Tap> column_taps;

    std::uint32_t detector_u() const noexcept { return dims.y; }
    std::uint32_t detector_v() const noexcept { return dims.z; }
    std::size_t image_size() const noexcept { return static_cast<std::size_t>(dims.y) * dims.z; }
};

RotationTable build_rotation_table(Dims3 dims, double angle_deg, double step = 1.0);

}  // namespace hsv::kernels
