#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsv/core/volume4d.hpp"

namespace hsv::metrics {

enum class MetricKind { mse, psnr, dssim, nmi, ncc, fhc_resolution };

inline constexpr std::array<MetricKind, 6> kAllMetrics = {
    MetricKind::mse, MetricKind::psnr, MetricKind::dssim,
    MetricKind::nmi, MetricKind::ncc,  MetricKind::fhc_resolution};

std::string_view metric_name(MetricKind kind);
MetricKind metric_from_name(std::string_view name);

enum class NmiVariant {
    joint_ratio,     // (H(A) + H(B)) / H(A,B), in [1, 2]
    geometric_mean,  // I(A;B) / sqrt(H(A) H(B)), in [0, 1]
};

struct MetricConfig {
    std::uint32_t nmi_bins = 64;
    NmiVariant nmi_variant = NmiVariant::joint_ratio;
    std::uint32_t ssim_window_spatial = 7;   // odd
    std::uint32_t ssim_window_temporal = 3;  // odd
    std::uint32_t fhc_shells = 0;            // 0 selects max(4, floor(min(T,X,Y,Z) / 2))
    std::optional<double> psnr_peak;         // unset: dynamic range of the reference

    void validate() const;
};

/// Radial hypershell correlation of two 4D volumes.
struct FhcCurve {
    std::vector<double> shell_centers;  // Nyquist-normalised radius, strictly increasing
    std::vector<double> correlations;
    std::vector<double> n_effective;
    std::vector<double> thresholds;     // half-bit threshold per shell
    std::vector<std::uint32_t> skipped_shells;  // empty shells, by shell index
    double resolution = 1.0;
};

// a is the reference where a metric is asymmetric (psnr, dssim).

double mse(const Volume4D& a, const Volume4D& b);

/// 10 log10(peak^2 / mse). Returns +infinity when the volumes are identical.
double psnr(const Volume4D& a, const Volume4D& b, std::optional<double> peak = std::nullopt);

/// (1 - mean SSIM) / 2 with a clipped separable box window (spatial^3 x temporal).
double dssim(const Volume4D& a, const Volume4D& b, std::uint32_t window_spatial = 7,
             std::uint32_t window_temporal = 3);

double nmi(const Volume4D& a, const Volume4D& b, std::uint32_t n_bins = 64,
           NmiVariant variant = NmiVariant::joint_ratio);

/// Global Pearson correlation over all voxels.
double ncc(const Volume4D& a, const Volume4D& b);

std::uint32_t default_fhc_shells(const Dims4& dims);

/// 4D Fourier hypershell correlation. n_shells = 0 selects default_fhc_shells.
FhcCurve fhc(const Volume4D& a, const Volume4D& b, std::uint32_t n_shells = 0);

/// Sum of |F|^2 / N over the full 4D spectrum (conjugate half counted twice).
/// Equals the sum of squared voxel values when the transform is unnormalised.
double spectrum_energy(const Volume4D& v);

/// Half-bit threshold (0.2071 + 1.9102/sqrt(n)) / (1.2071 + 0.9102/sqrt(n)).
double half_bit(double n_effective);

/// First sub-threshold crossing, linearly interpolated between shell centres; 1.0 if none.
double crossing_resolution(const FhcCurve& curve);

struct MetricValues {
    std::array<double, 6> values{};       // indexed like kAllMetrics; NaN on error
    std::array<std::string, 6> errors{};  // empty on success
    std::optional<FhcCurve> fhc_curve;

    double operator[](MetricKind k) const { return values[static_cast<std::size_t>(k)]; }
};

/// All six metrics. Degenerate inputs are recorded per metric; a dims mismatch throws.
MetricValues evaluate_all(const Volume4D& a, const Volume4D& b, const MetricConfig& config = {});

}  // namespace hsv::metrics
