#include "hsv/kernels/projection_kernels.hpp"

#include <algorithm>

namespace hsv::kernels {
namespace {

inline void forward_row(const RotationTable& t, std::uint32_t u, const double* frame, double* image) {
    const std::size_t nz = t.dims.z;
    double* out = image + u * nz;
    std::fill(out, out + nz, 0.0);
    for (std::uint32_t k = t.row_offsets[u]; k < t.row_offsets[u + 1]; ++k) {
        const Tap tap = t.row_taps[k];
        const double* src = frame + static_cast<std::size_t>(tap.index) * nz;
        for (std::size_t v = 0; v < nz; ++v) out[v] += tap.weight * src[v];
    }
}

inline void adjoint_column(const RotationTable& t, std::size_t col, const double* image, double* frame) {
    const std::size_t nz = t.dims.z;
    double* out = frame + col * nz;
    std::fill(out, out + nz, 0.0);
    for (std::uint32_t k = t.column_offsets[col]; k < t.column_offsets[col + 1]; ++k) {
        const Tap tap = t.column_taps[k];
        const double* src = image + static_cast<std::size_t>(tap.index) * nz;
        for (std::size_t v = 0; v < nz; ++v) out[v] += tap.weight * src[v];
    }
}

}  // namespace

namespace serial {

void forward(const RotationTable& table, std::span<const double> frame, std::span<double> image) {
    for (std::uint32_t u = 0; u < table.dims.y; ++u) forward_row(table, u, frame.data(), image.data());
}

// Reference scatter form: walks rows and pushes each detector value back along its taps.
void adjoint(const RotationTable& table, std::span<const double> image, std::span<double> frame) {
    const std::size_t nz = table.dims.z;
    std::fill(frame.begin(), frame.end(), 0.0);
    for (std::uint32_t u = 0; u < table.dims.y; ++u) {
        const double* src = image.data() + u * nz;
        for (std::uint32_t k = table.row_offsets[u]; k < table.row_offsets[u + 1]; ++k) {
            const Tap tap = table.row_taps[k];
            double* out = frame.data() + static_cast<std::size_t>(tap.index) * nz;
            for (std::size_t v = 0; v < nz; ++v) out[v] += tap.weight * src[v];
        }
    }
}

}  // namespace serial

namespace parallel {

void forward(const RotationTable& table, std::span<const double> frame, std::span<double> image) {
    const auto rows = static_cast<long>(table.dims.y);
#pragma omp parallel for schedule(static)
    for (long u = 0; u < rows; ++u) {
        forward_row(table, static_cast<std::uint32_t>(u), frame.data(), image.data());
    }
}

void adjoint(const RotationTable& table, std::span<const double> image, std::span<double> frame) {
    const auto cols = static_cast<long>(table.column_offsets.size() - 1);
#pragma omp parallel for schedule(static)
    for (long col = 0; col < cols; ++col) {
        adjoint_column(table, static_cast<std::size_t>(col), image.data(), frame.data());
    }
}

}  // namespace parallel
}  // namespace hsv::kernels
