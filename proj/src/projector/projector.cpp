#include "hsv/projector/projector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsv/error.hpp"
#include "hsv/kernels/projection_kernels.hpp"

namespace hsv::projector {

std::span<const float> ProjectionSet::image(std::size_t t, std::size_t angle) const {
    if (t >= frames || angle >= n_angles()) throw DomainError("ProjectionSet: index out of range");
    return std::span<const float>(pixels).subspan((t * n_angles() + angle) * image_size(),
                                                  image_size());
}

ProjectionSet ProjectionSet::select_angles(std::span<const std::size_t> positions) const {
    ProjectionSet out;
    out.experiment_id = experiment_id;
    out.geometry_known = geometry_known;
    out.frames = frames;
    out.detector_u = detector_u;
    out.detector_v = detector_v;
    for (std::size_t p : positions) {
        if (p >= n_angles()) throw DomainError("ProjectionSet: angle position out of range");
        out.angles_deg.push_back(angles_deg[p]);
    }
    out.pixels.reserve(frames * positions.size() * image_size());
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t p : positions) {
            auto img = image(t, p);
            out.pixels.insert(out.pixels.end(), img.begin(), img.end());
        }
    }
    return out;
}

void validate_angles(std::span<const double> angles_deg) {
    if (angles_deg.empty()) throw SamplingError("angle list is empty");
    std::vector<double> sorted(angles_deg.begin(), angles_deg.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!(sorted[i] >= 0.0) || !(sorted[i] < 180.0)) {
            throw SamplingError("angle " + std::to_string(sorted[i]) + " outside [0, 180)");
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw SamplingError("duplicate angle " + std::to_string(sorted[i]));
        }
    }
}

void ProjectionSet::validate() const {
    validate_angles(angles_deg);
    if (frames == 0 || detector_u == 0 || detector_v == 0) {
        throw DomainError("ProjectionSet: frames and detector dims must be positive");
    }
    if (pixels.size() != frames * n_angles() * image_size()) {
        throw DimensionMismatch("ProjectionSet: pixel count does not match T * angles * U * V");
    }
}

std::vector<double> project_frame(std::span<const float> frame, Dims3 dims, double angle_deg) {
    if (!(angle_deg >= 0.0) || !(angle_deg < 180.0)) {
        throw SamplingError("project_frame: angle outside [0, 180)");
    }
    if (frame.size() != dims.size()) throw DimensionMismatch("project_frame: frame size mismatch");
    const auto table = kernels::build_rotation_table(dims, angle_deg);
    std::vector<double> in(frame.begin(), frame.end());
    std::vector<double> image(table.image_size());
    kernels::parallel::forward(table, in, image);
    return image;
}

ProjectionSet acquire(const Volume4D& volume, std::span<const double> angles_deg,
                      bool geometry_known, std::uint32_t experiment_id) {
    validate_angles(angles_deg);
    const Dims3 d3 = spatial(volume.dims());
    std::vector<kernels::RotationTable> tables;
    tables.reserve(angles_deg.size());
    for (double a : angles_deg) tables.push_back(kernels::build_rotation_table(d3, a));

    ProjectionSet set;
    set.experiment_id = experiment_id;
    set.angles_deg.assign(angles_deg.begin(), angles_deg.end());
    set.geometry_known = geometry_known;
    set.frames = volume.dims().t;
    set.detector_u = d3.y;
    set.detector_v = d3.z;
    set.pixels.resize(set.frames * set.n_angles() * set.image_size());

    const auto frames = static_cast<long>(set.frames);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < frames; ++t) {
        auto f = volume.frame(static_cast<std::size_t>(t));
        std::vector<double> in(f.begin(), f.end());
        std::vector<double> image(set.image_size());
        for (std::size_t a = 0; a < tables.size(); ++a) {
            kernels::serial::forward(tables[a], in, image);
            float* out = set.pixels.data() + (static_cast<std::size_t>(t) * tables.size() + a) *
                                                 set.image_size();
            std::transform(image.begin(), image.end(), out,
                           [](double v) { return static_cast<float>(v); });
        }
    }
    return set;
}

}  // namespace hsv::projector
