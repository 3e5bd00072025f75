#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "hsv/error.hpp"
#include "hsv/metrics/metrics.hpp"

namespace hsv::metrics {
namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

// Half spectrum (last axis Z/2 + 1) of a 4D real array.
class RealTransform4D {
public:
    explicit RealTransform4D(const Dims4& d) : dims_(d) {
        n_real_ = d.size();
        n_complex_ = std::size_t{d.t} * d.x * d.y * (d.z / 2 + 1);
        auto in = fftw_buffer<double>(n_real_);
        auto out = fftw_buffer<fftw_complex>(n_complex_);
        const int n[4] = {int(d.t), int(d.x), int(d.y), int(d.z)};
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c(4, n, in.get(), out.get(), FFTW_ESTIMATE);
        if (plan_ == nullptr) throw Error("fhc: FFTW planning failed");
    }
    ~RealTransform4D() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealTransform4D(const RealTransform4D&) = delete;
    RealTransform4D& operator=(const RealTransform4D&) = delete;

    FftwBuffer<fftw_complex> forward(std::span<const float> data) const {
        auto in = fftw_buffer<double>(n_real_);
        std::copy(data.begin(), data.end(), in.get());
        auto out = fftw_buffer<fftw_complex>(n_complex_);
        fftw_execute_dft_r2c(plan_, in.get(), out.get());
        return out;
    }

private:
    Dims4 dims_;
    std::size_t n_real_ = 0;
    std::size_t n_complex_ = 0;
    fftw_plan plan_ = nullptr;
};

// Signed frequency index divided by the axis Nyquist index n/2. Singleton axes map to 0.
std::vector<double> normalized_axis(std::uint32_t n) {
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    const double nyq = 0.5 * n;
    for (std::uint32_t k = 0; k < n; ++k) {
        const double f = k <= n / 2 ? double(k) : double(k) - double(n);
        out[k] = f / nyq;
    }
    return out;
}

struct ShellSums {
    std::vector<double> cross, power_a, power_b, count;
    explicit ShellSums(std::size_t n) : cross(n, 0.0), power_a(n, 0.0), power_b(n, 0.0), count(n, 0.0) {}
};

}  // namespace

double spectrum_energy(const Volume4D& v) {
    const Dims4 d = v.dims();
    const RealTransform4D transform(d);
    const auto f = transform.forward(v.data());
    const std::uint32_t half_z = d.z / 2 + 1;
    const bool z_even = d.z % 2 == 0;
    double total = 0.0;
    std::size_t i = 0;
    for (std::size_t line = 0; line < std::size_t{d.t} * d.x * d.y; ++line) {
        for (std::uint32_t kz = 0; kz < half_z; ++kz, ++i) {
            const double w = (kz == 0 || (z_even && kz == d.z / 2)) ? 1.0 : 2.0;
            total += w * (f[i][0] * f[i][0] + f[i][1] * f[i][1]);
        }
    }
    return total / double(d.size());
}

std::uint32_t default_fhc_shells(const Dims4& d) {
    const std::uint32_t m = std::min({d.t, d.x, d.y, d.z});
    return std::max<std::uint32_t>(4, m / 2);
}

double half_bit(double n_effective) {
    if (!(n_effective >= 1.0)) throw DomainError("half_bit: n_effective must be >= 1");
    const double s = std::sqrt(n_effective);
    return (0.2071 + 1.9102 / s) / (1.2071 + 0.9102 / s);
}

double crossing_resolution(const FhcCurve& curve) {
    const std::size_t n = curve.correlations.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double below = curve.correlations[j] - curve.thresholds[j];
        if (below >= 0.0) continue;
        if (j == 0) return curve.shell_centers[0];
        const double above = curve.correlations[j - 1] - curve.thresholds[j - 1];
        const double frac = above / (above - below);
        return curve.shell_centers[j - 1] + frac * (curve.shell_centers[j] - curve.shell_centers[j - 1]);
    }
    return 1.0;
}

FhcCurve fhc(const Volume4D& a, const Volume4D& b, std::uint32_t n_shells) {
    if (!(a.dims() == b.dims())) throw DimensionMismatch("fhc: volumes have different dimensions");
    const Dims4 d = a.dims();
    if (n_shells == 0) n_shells = default_fhc_shells(d);
    if (n_shells < 4) throw DomainError("fhc: n_shells must be >= 4");

    const RealTransform4D transform(d);
    const auto fa = transform.forward(a.data());
    const auto fb = transform.forward(b.data());

    const auto ft = normalized_axis(d.t);
    const auto fx = normalized_axis(d.x);
    const auto fy = normalized_axis(d.y);
    const auto fz = normalized_axis(d.z);
    const std::uint32_t half_z = d.z / 2 + 1;
    const bool z_even = d.z % 2 == 0;

    // One accumulator per time-frequency slice, folded in slice order afterwards.
    std::vector<ShellSums> slices(d.t, ShellSums(n_shells));
    const auto n_t = static_cast<long>(d.t);
#pragma omp parallel for schedule(static)
    for (long kt = 0; kt < n_t; ++kt) {
        ShellSums& s = slices[static_cast<std::size_t>(kt)];
        const double rt2 = ft[kt] * ft[kt];
        std::size_t i = static_cast<std::size_t>(kt) * d.x * d.y * half_z;
        for (std::uint32_t kx = 0; kx < d.x; ++kx) {
            const double rx2 = rt2 + fx[kx] * fx[kx];
            for (std::uint32_t ky = 0; ky < d.y; ++ky) {
                const double ry2 = rx2 + fy[ky] * fy[ky];
                for (std::uint32_t kz = 0; kz < half_z; ++kz, ++i) {
                    const double r = std::sqrt(ry2 + fz[kz] * fz[kz]);
                    if (r == 0.0 || r > 1.0) continue;
                    // Voxels off the kz = 0 and kz = Z/2 planes stand for themselves and their conjugate.
                    const double w = (kz == 0 || (z_even && kz == d.z / 2)) ? 1.0 : 2.0;
                    const auto shell = std::min<std::uint32_t>(
                        static_cast<std::uint32_t>(std::ceil(r * n_shells)) - 1, n_shells - 1);
                    const double ar = fa[i][0], ai = fa[i][1];
                    const double br = fb[i][0], bi = fb[i][1];
                    s.cross[shell] += w * (ar * br + ai * bi);
                    s.power_a[shell] += w * (ar * ar + ai * ai);
                    s.power_b[shell] += w * (br * br + bi * bi);
                    s.count[shell] += w;
                }
            }
        }
    }
    ShellSums total(n_shells);
    for (const ShellSums& s : slices) {
        for (std::uint32_t j = 0; j < n_shells; ++j) {
            total.cross[j] += s.cross[j];
            total.power_a[j] += s.power_a[j];
            total.power_b[j] += s.power_b[j];
            total.count[j] += s.count[j];
        }
    }

    FhcCurve curve;
    for (std::uint32_t j = 0; j < n_shells; ++j) {
        if (total.count[j] == 0.0) {
            curve.skipped_shells.push_back(j);
            continue;
        }
        const double denom = std::sqrt(total.power_a[j] * total.power_b[j]);
        const double corr = denom > 0.0 ? total.cross[j] / denom : 0.0;
        const double n_eff = std::ceil(total.count[j] / 2.0);
        curve.shell_centers.push_back((j + 0.5) / n_shells);
        curve.correlations.push_back(std::clamp(corr, -1.0, 1.0));
        curve.n_effective.push_back(n_eff);
        curve.thresholds.push_back(half_bit(n_eff));
    }
    curve.resolution = crossing_resolution(curve);
    return curve;
}

}  // namespace hsv::metrics
