#pragma once

#include <filesystem>
#include <iosfwd>

#include "hsv/projector/projector.hpp"

namespace hsv::projector {

// PRJ4D layout (little-endian, no padding):
//   [0, 8)    magic "PRJ4D\0\0\0"
//   [8, 12)   experiment_id uint32
//   [12, 16)  T uint32
//   [16, 20)  n_angles uint32
//   [20, 24)  detector u uint32
//   [24, 28)  detector v uint32
//   [28]      geometry_known uint8 (0 or 1)
//   [29, ..)  n_angles float64 angles in degrees
//   then      T*n_angles*u*v float32 pixels, (t, angle, u, v) row-major
inline constexpr std::size_t kProjectionHeaderSize = 29;

void write_projections(const ProjectionSet& set, std::ostream& out);
void write_projections(const ProjectionSet& set, const std::filesystem::path& path);

ProjectionSet read_projections(std::istream& in);
ProjectionSet read_projections(const std::filesystem::path& path);

}  // namespace hsv::projector
