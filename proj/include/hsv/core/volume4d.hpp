#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hsv {

/// Extent of a T x X x Y x Z grid. Storage order is (t, x, y, z) row-major, z fastest.
struct Dims4 {
    std::uint32_t t = 0;
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    std::size_t frame_size() const noexcept {
        return static_cast<std::size_t>(x) * y * z;
    }
    std::size_t size() const noexcept { return frame_size() * t; }

    friend bool operator==(const Dims4&, const Dims4&) = default;
};

/// Spatial extent of one frame.
struct Dims3 {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(x) * y * z; }
    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
        return (ix * y + iy) * z + iz;
    }

    friend bool operator==(const Dims3&, const Dims3&) = default;
};

inline Dims3 spatial(const Dims4& d) noexcept { return {d.x, d.y, d.z}; }

/// Time-resolved scalar volume with uniform voxel spacing and frame interval.
///
/// Immutable after construction; the constructor enforces positive dims,
/// matching data length, finite values, and positive dx / dt.
class Volume4D {
public:
    Volume4D(Dims4 dims, double spacing_dx, double frame_dt, std::vector<float> data);

    static Volume4D zeros(Dims4 dims, double spacing_dx = 1.0, double frame_dt = 1.0);

    const Dims4& dims() const noexcept { return dims_; }
    double spacing_dx() const noexcept { return dx_; }
    double frame_dt() const noexcept { return dt_; }

    std::span<const float> data() const noexcept { return data_; }
    std::span<const float> frame(std::size_t t) const;

    float at(std::size_t t, std::size_t x, std::size_t y, std::size_t z) const noexcept {
        return data_[((t * dims_.x + x) * dims_.y + y) * dims_.z + z];
    }

    /// New volume holding the listed frames in order.
    Volume4D select_frames(std::span<const std::size_t> frames) const;

    friend bool operator==(const Volume4D&, const Volume4D&) = default;

private:
    Dims4 dims_;
    double dx_;
    double dt_;
    std::vector<float> data_;
};

}  // namespace hsv
