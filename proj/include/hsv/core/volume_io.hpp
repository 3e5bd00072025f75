#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "hsv/core/volume4d.hpp"

namespace hsv {

// VOL4D layout:
//   [0, 8)    magic "VOL4D\0\0\0"
//   [8, 24)   T, X, Y, Z as uint32 little-endian
//   [24, 32)  dx as float64 little-endian
//   [32, 40)  dt as float64 little-endian
//   [40, 64)  zero padding
//   [64, ..)  T*X*Y*Z float32 little-endian, (t, x, y, z) row-major
inline constexpr std::size_t kVolumeHeaderSize = 64;

void write_volume(const Volume4D& volume, std::ostream& out);
void write_volume(const Volume4D& volume, const std::filesystem::path& path);

Volume4D read_volume(std::istream& in);
Volume4D read_volume(const std::filesystem::path& path);

}  // namespace hsv
