#include "hsv/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsv/error.hpp"
#include "hsv/kernels/box_filter.hpp"

namespace hsv::metrics {
namespace {

void require_same_dims(const Volume4D& a, const Volume4D& b, const char* who) {
    if (!(a.dims() == b.dims())) {
        throw DimensionMismatch(std::string(who) + ": volumes have different dimensions");
    }
}

// Sum f(i) over all voxels. Frames are summed independently (in parallel) and
// the partials folded in frame order, so the result does not depend on thread count.
template <typename F>
double frame_sum(const Dims4& dims, F f) {
    const std::size_t fs = dims.frame_size();
    std::vector<double> partial(dims.t, 0.0);
    const auto frames = static_cast<long>(dims.t);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < frames; ++t) {
        double s = 0.0;
        const std::size_t base = static_cast<std::size_t>(t) * fs;
        for (std::size_t i = 0; i < fs; ++i) s += f(base + i);
        partial[static_cast<std::size_t>(t)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double mean_of(const Volume4D& v) {
    auto d = v.data();
    return frame_sum(v.dims(), [&](std::size_t i) { return double(d[i]); }) / double(d.size());
}

std::pair<double, double> range_of(const Volume4D& v) {
    auto [lo, hi] = std::minmax_element(v.data().begin(), v.data().end());
    return {double(*lo), double(*hi)};
}

std::vector<std::uint32_t> bin_indices(const Volume4D& v, std::uint32_t n_bins) {
    const auto [lo, hi] = range_of(v);
    if (!(hi > lo)) throw DegenerateInputError("nmi: constant volume has zero entropy");
    const double scale = double(n_bins) / (hi - lo);
    auto d = v.data();
    std::vector<std::uint32_t> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto k = static_cast<std::uint32_t>((double(d[i]) - lo) * scale);
        out[i] = std::min(k, n_bins - 1);
    }
    return out;
}

double entropy(const std::vector<std::uint64_t>& counts, double total) {
    double h = 0.0;
    for (std::uint64_t c : counts) {
        if (c == 0) continue;
        const double p = double(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::string_view metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::mse: return "mse";
        case MetricKind::psnr: return "psnr_db";
        case MetricKind::dssim: return "dssim";
        case MetricKind::nmi: return "nmi";
        case MetricKind::ncc: return "ncc";
        case MetricKind::fhc_resolution: return "fhc_resolution";
    }
    return "?";
}

MetricKind metric_from_name(std::string_view name) {
    for (MetricKind k : kAllMetrics) {
        if (metric_name(k) == name) return k;
    }
    throw DomainError("unknown metric '" + std::string(name) + "'");
}

void MetricConfig::validate() const {
    if (nmi_bins < 2) throw DomainError("metrics: nmi_bins must be >= 2");
    if (ssim_window_spatial % 2 == 0 || ssim_window_temporal % 2 == 0) {
        throw DomainError("metrics: SSIM window lengths must be odd");
    }
    if (fhc_shells != 0 && fhc_shells < 4) throw DomainError("metrics: fhc_shells must be >= 4");
    if (psnr_peak && !(*psnr_peak > 0.0)) throw DomainError("metrics: psnr_peak must be > 0");
}

double mse(const Volume4D& a, const Volume4D& b) {
    require_same_dims(a, b, "mse");
    auto da = a.data();
    auto db = b.data();
    const double s = frame_sum(a.dims(), [&](std::size_t i) {
        const double d = double(da[i]) - double(db[i]);
        return d * d;
    });
    return s / double(da.size());
}

double psnr(const Volume4D& a, const Volume4D& b, std::optional<double> peak) {
    const double e = mse(a, b);
    double p;
    if (peak) {
        p = *peak;
    } else {
        const auto [lo, hi] = range_of(a);
        p = hi - lo;
    }
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    if (!(p > 0.0)) throw DegenerateInputError("psnr: reference has zero dynamic range");
    return 10.0 * std::log10(p * p / e);
}

double dssim(const Volume4D& a, const Volume4D& b, std::uint32_t window_spatial,
             std::uint32_t window_temporal) {
    require_same_dims(a, b, "dssim");
    if (window_spatial % 2 == 0 || window_temporal % 2 == 0) {
        throw DomainError("dssim: window lengths must be odd");
    }
    const auto [lo, hi] = range_of(a);
    const double range = hi - lo;
    if (!(range > 0.0)) throw DegenerateInputError("dssim: reference has zero dynamic range");
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);

    const Dims4 d = a.dims();
    const std::size_t n = d.size();
    auto da = a.data();
    auto db = b.data();
    std::vector<double> va(n), vb(n), vaa(n), vbb(n), vab(n);
    for (std::size_t i = 0; i < n; ++i) {
        va[i] = da[i];
        vb[i] = db[i];
        vaa[i] = va[i] * va[i];
        vbb[i] = vb[i] * vb[i];
        vab[i] = va[i] * vb[i];
    }
    const kernels::HalfWidths half = {window_temporal / 2, window_spatial / 2, window_spatial / 2,
                                      window_spatial / 2};
    const auto sa = kernels::parallel::box_sum(va, d, half);
    const auto sb = kernels::parallel::box_sum(vb, d, half);
    const auto saa = kernels::parallel::box_sum(vaa, d, half);
    const auto sbb = kernels::parallel::box_sum(vbb, d, half);
    const auto sab = kernels::parallel::box_sum(vab, d, half);

    const std::size_t fs = d.frame_size();
    std::vector<double> partial(d.t, 0.0);
    const auto frames = static_cast<long>(d.t);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < frames; ++t) {
        const auto ut = static_cast<std::uint32_t>(t);
        const double nt = kernels::clipped_length(ut, d.t, half[0]);
        double acc = 0.0;
        std::size_t i = static_cast<std::size_t>(t) * fs;
        for (std::uint32_t x = 0; x < d.x; ++x) {
            const double nx = nt * kernels::clipped_length(x, d.x, half[1]);
            for (std::uint32_t y = 0; y < d.y; ++y) {
                const double nxy = nx * kernels::clipped_length(y, d.y, half[2]);
                for (std::uint32_t z = 0; z < d.z; ++z, ++i) {
                    const double cnt = nxy * kernels::clipped_length(z, d.z, half[3]);
                    const double ma = sa[i] / cnt;
                    const double mb = sb[i] / cnt;
                    const double var_a = saa[i] / cnt - ma * ma;
                    const double var_b = sbb[i] / cnt - mb * mb;
                    const double cov = sab[i] / cnt - ma * mb;
                    acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                           ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                }
            }
        }
        partial[static_cast<std::size_t>(t)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return (1.0 - total / double(n)) / 2.0;
}

double nmi(const Volume4D& a, const Volume4D& b, std::uint32_t n_bins, NmiVariant variant) {
    require_same_dims(a, b, "nmi");
    if (n_bins < 2) throw DomainError("nmi: n_bins must be >= 2");
    const auto ia = bin_indices(a, n_bins);
    const auto ib = bin_indices(b, n_bins);
    std::vector<std::uint64_t> ha(n_bins, 0), hb(n_bins, 0), hab(std::size_t{n_bins} * n_bins, 0);
    for (std::size_t i = 0; i < ia.size(); ++i) {
        ++ha[ia[i]];
        ++hb[ib[i]];
        ++hab[std::size_t{ia[i]} * n_bins + ib[i]];
    }
    const double total = double(ia.size());
    const double h_a = entropy(ha, total);
    const double h_b = entropy(hb, total);
    const double h_ab = entropy(hab, total);
    if (!(h_a > 0.0) || !(h_b > 0.0)) {
        throw DegenerateInputError("nmi: a single occupied bin gives zero entropy");
    }
    if (variant == NmiVariant::geometric_mean) return (h_a + h_b - h_ab) / std::sqrt(h_a * h_b);
    return (h_a + h_b) / h_ab;
}

double ncc(const Volume4D& a, const Volume4D& b) {
    require_same_dims(a, b, "ncc");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    auto da = a.data();
    auto db = b.data();
    const Dims4 d = a.dims();
    const double saa = frame_sum(d, [&](std::size_t i) {
        const double u = da[i] - ma;
        return u * u;
    });
    const double sbb = frame_sum(d, [&](std::size_t i) {
        const double v = db[i] - mb;
        return v * v;
    });
    const double sab = frame_sum(d, [&](std::size_t i) { return (da[i] - ma) * (db[i] - mb); });
    if (!(saa > 0.0) || !(sbb > 0.0)) throw DegenerateInputError("ncc: zero variance input");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

MetricValues evaluate_all(const Volume4D& a, const Volume4D& b, const MetricConfig& config) {
    config.validate();
    require_same_dims(a, b, "evaluate_all");
    MetricValues out;
    out.values.fill(std::numeric_limits<double>::quiet_NaN());
    auto run = [&](MetricKind k, auto&& fn) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            out.values[idx] = fn();
        } catch (const DegenerateInputError& e) {
            out.errors[idx] = e.what();
        }
    };
    run(MetricKind::mse, [&] { return mse(a, b); });
    run(MetricKind::psnr, [&] { return psnr(a, b, config.psnr_peak); });
    run(MetricKind::dssim,
        [&] { return dssim(a, b, config.ssim_window_spatial, config.ssim_window_temporal); });
    run(MetricKind::nmi, [&] { return nmi(a, b, config.nmi_bins, config.nmi_variant); });
    run(MetricKind::ncc, [&] { return ncc(a, b); });
    run(MetricKind::fhc_resolution, [&] {
        out.fhc_curve = fhc(a, b, config.fhc_shells);
        return out.fhc_curve->resolution;
    });
    return out;
}

}  // namespace hsv::metrics
