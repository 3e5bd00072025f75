#pragma once

#include <cstdint>
#include <vector>

namespace hsv::projector {

/// The acquisition grid: 16 evenly spaced angles over a half turn.
inline constexpr std::uint32_t kGridAngles = 16;
inline constexpr double kGridStepDeg = 180.0 / kGridAngles;  // 11.25

/// {base + m * 180/i : m = 0..i-1} with base = offset_index * 11.25, reduced mod 180.
/// Requires i >= 2 (a single view shares no 3D information) and offset_index * i < 16.
std::vector<double> evenly_spaced_angles(std::uint32_t count, std::uint32_t offset_index);

/// Four views 45 deg apart with a per-experiment offset of ((e - 1) mod 8) * 11.25 deg.
/// Angles are wrapped into [0, 180) but keep their row order, so rows 5-8 and 13-16 end
/// with the wrapped angle.
std::vector<double> ultra_sparse_angles(std::uint32_t experiment_index);

/// Index of an angle on the 16-angle grid; throws if the angle is off-grid.
std::uint32_t grid_index(double angle_deg);

}  // namespace hsv::projector
