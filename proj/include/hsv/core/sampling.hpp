#pragma once

#include <cstdint>

namespace hsv {

/// Object extent and target resolution for angular-sampling estimates.
/// Rotation axis is z and the angular range a half turn.
struct GeometrySpec {
    double object_extent = 0.0;
    double target_resolution = 0.0;

    void validate() const;
};

/// Maximum object speed resolvable without temporal aliasing: dx / dt.
double nyquist_velocity(double dx, double dt);

/// Minimum number of evenly spaced projections over 180 deg, ceil(pi * D / d).
std::uint64_t crowther_count(double object_extent, double target_resolution);
std::uint64_t crowther_count(const GeometrySpec& geometry);

/// Fraction of the Crowther requirement covered by `acquired` projections.
double crowther_coverage(std::uint64_t acquired, double object_extent, double target_resolution);

/// True iff displacement per frame v_max * dt is at most one voxel dx.
bool check_temporal_nyquist(double v_max, double dx, double dt);

}  // namespace hsv
