#pragma once

#include <span>

#include "hsv/kernels/rotation_table.hpp"

// Forward: image(u, v) = sum over taps of row u of w * frame(col, v).
// Adjoint: frame(col, v) = sum over taps of column col of w * image(u, v); overwrites `frame`.
//
// The parallel variants split work over detector rows (forward) or in-plane
// columns (adjoint). Each output element is accumulated in the same order as
// in the serial reference, so both produce bitwise-equal results for any
// thread count.

namespace hsv::kernels::serial {

void forward(const RotationTable& table, std::span<const double> frame, std::span<double> image);
void adjoint(const RotationTable& table, std::span<const double> image, std::span<double> frame);

}  // namespace hsv::kernels::serial

namespace hsv::kernels::parallel {

void forward(const RotationTable& table, std::span<const double> frame, std::span<double> image);
void adjoint(const RotationTable& table, std::span<const double> image, std::span<double> frame);

}  // namespace hsv::kernels::parallel
