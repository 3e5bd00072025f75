#include "hsv/projector/angles.hpp"

#include <cmath>
#include <string>

#include "hsv/error.hpp"

namespace hsv::projector {

std::vector<double> evenly_spaced_angles(std::uint32_t count, std::uint32_t offset_index) {
    if (count == 1) {
        throw SamplingError(
            "evenly_spaced_angles: i = 1 is excluded; a single view carries no shared 3D information");
    }
    if (count == 0) throw SamplingError("evenly_spaced_angles: count must be >= 2");
    if (std::uint64_t{offset_index} * count >= kGridAngles) {
        throw SamplingError("evenly_spaced_angles: offset_index " + std::to_string(offset_index) +
                            " out of range for i = " + std::to_string(count));
    }
    const double base = offset_index * kGridStepDeg;
    const double spacing = 180.0 / count;
    std::vector<double> out;
    out.reserve(count);
    for (std::uint32_t m = 0; m < count; ++m) out.push_back(std::fmod(base + m * spacing, 180.0));
    return out;
}

std::vector<double> ultra_sparse_angles(std::uint32_t experiment_index) {
    if (experiment_index < 1 || experiment_index > 16) {
        throw SamplingError("ultra_sparse_angles: experiment index " +
                            std::to_string(experiment_index) + " outside 1..16");
    }
    const double offset = ((experiment_index - 1) % 8) * kGridStepDeg;
    std::vector<double> out;
    for (double a : {0.0, 45.0, 90.0, 135.0}) out.push_back(std::fmod(offset + a, 180.0));
    return out;
}

std::uint32_t grid_index(double angle_deg) {
    const double k = angle_deg / kGridStepDeg;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 || r < 0 || r >= kGridAngles) {
        throw SamplingError("grid_index: angle " + std::to_string(angle_deg) + " is not on the grid");
    }
    return static_cast<std::uint32_t>(r);
}

}  // namespace hsv::projector
