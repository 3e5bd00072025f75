#include "hsv/core/volume4d.hpp"

#include <cmath>
#include <string>

#include "hsv/error.hpp"

namespace hsv {

Volume4D::Volume4D(Dims4 dims, double spacing_dx, double frame_dt, std::vector<float> data)
    : dims_(dims), dx_(spacing_dx), dt_(frame_dt), data_(std::move(data)) {
    if (dims_.t == 0 || dims_.x == 0 || dims_.y == 0 || dims_.z == 0) {
        throw DomainError("Volume4D: all dims must be positive");
    }
    if (!(dx_ > 0.0) || !std::isfinite(dx_) || !(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw DomainError("Volume4D: spacing_dx and frame_dt must be positive and finite");
    }
    if (data_.size() != dims_.size()) {
        throw DimensionMismatch("Volume4D: data length " + std::to_string(data_.size()) +
                                " != T*X*Y*Z = " + std::to_string(dims_.size()));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw DomainError("Volume4D: non-finite value at index " + std::to_string(i));
        }
    }
}

Volume4D Volume4D::zeros(Dims4 dims, double spacing_dx, double frame_dt) {
    return Volume4D(dims, spacing_dx, frame_dt, std::vector<float>(dims.size(), 0.0f));
}

std::span<const float> Volume4D::frame(std::size_t t) const {
    if (t >= dims_.t) throw DomainError("Volume4D: frame index out of range");
    return std::span<const float>(data_).subspan(t * dims_.frame_size(), dims_.frame_size());
}

Volume4D Volume4D::select_frames(std::span<const std::size_t> frames) const {
    if (frames.empty()) throw DomainError("Volume4D: cannot select zero frames");
    const std::size_t fs = dims_.frame_size();
    std::vector<float> out;
    out.reserve(fs * frames.size());
    for (std::size_t t : frames) {
        auto f = frame(t);
        out.insert(out.end(), f.begin(), f.end());
    }
    Dims4 d = dims_;
    d.t = static_cast<std::uint32_t>(frames.size());
    return Volume4D(d, dx_, dt_, std::move(out));
}

}  // namespace hsv
