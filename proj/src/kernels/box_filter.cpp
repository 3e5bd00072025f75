#include "hsv/kernels/box_filter.hpp"

namespace hsv::kernels {
namespace {

// One axis of the separable filter. The grid is viewed as [outer][n][inner];
// each (outer, inner) pair is an independent line.
struct AxisPass {
    std::size_t outer;
    std::size_t n;
    std::size_t inner;
    std::uint32_t half;
};

inline void filter_line(const AxisPass& p, std::size_t line, const double* in, double* out) {
    const std::size_t o = line / p.inner;
    const std::size_t i = line % p.inner;
    const double* src = in + o * p.n * p.inner + i;
    double* dst = out + o * p.n * p.inner + i;
    for (std::size_t k = 0; k < p.n; ++k) {
        const std::size_t lo = k >= p.half ? k - p.half : 0;
        const std::size_t hi = k + p.half < p.n ? k + p.half : p.n - 1;
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += src[j * p.inner];
        dst[k * p.inner] = sum;
    }
}

std::array<AxisPass, 4> passes(Dims4 d, HalfWidths h) {
    const std::size_t t = d.t, x = d.x, y = d.y, z = d.z;
    return {{
        {t * x * y, z, 1, h[3]},
        {t * x, y, z, h[2]},
        {t, x, y * z, h[1]},
        {1, t, x * y * z, h[0]},
    }};
}

}  // namespace

namespace serial {

std::vector<double> box_sum(std::span<const double> in, Dims4 dims, HalfWidths half) {
    std::vector<double> a(in.begin(), in.end());
    std::vector<double> b(a.size());
    for (const AxisPass& p : passes(dims, half)) {
        const std::size_t lines = p.outer * p.inner;
        for (std::size_t line = 0; line < lines; ++line) filter_line(p, line, a.data(), b.data());
        a.swap(b);
    }
    return a;
}

}  // namespace serial

namespace parallel {

std::vector<double> box_sum(std::span<const double> in, Dims4 dims, HalfWidths half) {
    std::vector<double> a(in.begin(), in.end());
    std::vector<double> b(a.size());
    for (const AxisPass& p : passes(dims, half)) {
        const auto lines = static_cast<long>(p.outer * p.inner);
#pragma omp parallel for schedule(static)
        for (long line = 0; line < lines; ++line) {
            filter_line(p, static_cast<std::size_t>(line), a.data(), b.data());
        }
        a.swap(b);
    }
    return a;
}

}  // namespace parallel
}  // namespace hsv::kernels
