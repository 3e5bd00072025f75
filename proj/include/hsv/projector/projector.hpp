#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsv/core/volume4d.hpp"
#include "hsv/kernels/rotation_table.hpp"

namespace hsv::projector {

/// Projections of one experiment: the same angle list at every frame.
/// Pixels are stored (t, angle, u, v) row-major with u over Y and v over Z.
struct ProjectionSet {
    std::uint32_t experiment_id = 0;
    std::vector<double> angles_deg;
    bool geometry_known = true;
    std::uint32_t frames = 0;
    std::uint32_t detector_u = 0;
    std::uint32_t detector_v = 0;
    std::vector<float> pixels;

    std::size_t image_size() const noexcept {
        return static_cast<std::size_t>(detector_u) * detector_v;
    }
    std::size_t n_angles() const noexcept { return angles_deg.size(); }

    std::span<const float> image(std::size_t t, std::size_t angle) const;

    /// Subset keeping the listed angle positions, in the given order.
    ProjectionSet select_angles(std::span<const std::size_t> positions) const;

    /// Throws on duplicate or out-of-range angles, or a pixel count mismatch.
    void validate() const;

    friend bool operator==(const ProjectionSet&, const ProjectionSet&) = default;
};

/// Throws SamplingError unless every angle is in [0, 180) and all are distinct.
void validate_angles(std::span<const double> angles_deg);

/// Line integrals of one frame at one angle; the frame is rotated by -angle about z
/// (bilinear, zero outside) and summed along x with unit step. Image is Y x Z.
std::vector<double> project_frame(std::span<const float> frame, Dims3 dims, double angle_deg);

/// Projects every frame at every angle. Frames run in parallel.
ProjectionSet acquire(const Volume4D& volume, std::span<const double> angles_deg,
                      bool geometry_known, std::uint32_t experiment_id = 0);

}  // namespace hsv::projector
