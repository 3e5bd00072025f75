#include "hsv/core/sampling.hpp"

#include <cmath>
#include <numbers>

#include "hsv/error.hpp"

namespace hsv {

void GeometrySpec::validate() const {
    if (!(target_resolution > 0.0)) throw DomainError("GeometrySpec: target resolution must be > 0");
    if (object_extent < target_resolution) {
        throw DomainError("GeometrySpec: object extent must be >= target resolution");
    }
}

double nyquist_velocity(double dx, double dt) {
    if (!(dx > 0.0) || !(dt > 0.0)) throw DomainError("nyquist_velocity: dx and dt must be > 0");
    return dx / dt;
}

std::uint64_t crowther_count(double object_extent, double target_resolution) {
    GeometrySpec{object_extent, target_resolution}.validate();
    return static_cast<std::uint64_t>(
        std::ceil(std::numbers::pi * object_extent / target_resolution));
}

std::uint64_t crowther_count(const GeometrySpec& geometry) {
    return crowther_count(geometry.object_extent, geometry.target_resolution);
}

double crowther_coverage(std::uint64_t acquired, double object_extent, double target_resolution) {
    return static_cast<double>(acquired) /
           static_cast<double>(crowther_count(object_extent, target_resolution));
}

bool check_temporal_nyquist(double v_max, double dx, double dt) {
    if (!(v_max > 0.0) || !(dx > 0.0) || !(dt > 0.0)) {
        throw DomainError("check_temporal_nyquist: arguments must be > 0");
    }
    return v_max * dt <= dx;
}

}  // namespace hsv
