#include "hsv/phantom/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "hsv/core/rng.hpp"
#include "hsv/error.hpp"

namespace hsv::phantom {
namespace {

int axis_index(Axis a) { return a == Axis::x ? 0 : (a == Axis::y ? 1 : 2); }

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Soft maximum k*log(exp(a/k) + exp(b/k)), evaluated without overflow.
double soft_max(double a, double b, double k) {
    const double hi = std::max(a, b);
    return hi + k * std::log1p(std::exp(-std::abs(a - b) / k));
}

double distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool sphere_inside(const std::array<double, 3>& c, double r, Dims4 dims) {
    const double n[3] = {double(dims.x), double(dims.y), double(dims.z)};
    for (int i = 0; i < 3; ++i) {
        if (c[i] - r < 0.0 || c[i] + r > n[i] - 1.0) return false;
    }
    // Inscribed cylinder about the rotation (z) axis.
    const double cx = 0.5 * (n[0] - 1.0), cy = 0.5 * (n[1] - 1.0);
    const double radial = std::hypot(c[0] - cx, c[1] - cy);
    return radial + r <= 0.5 * (std::min(n[0], n[1]) - 1.0);
}

}  // namespace

void PhantomParams::validate() const {
    if (!(blend_width > 0.0)) throw GeometryError("phantom: blend_width must be > 0");
    if (!(speed >= 0.0) || speed > 1.0) {
        throw GeometryError("phantom: speed " + std::to_string(speed) +
                            " violates the temporal Nyquist limit of 1 voxel/frame");
    }
    if (radius_a < 2.0 * blend_width || radius_b < 2.0 * blend_width) {
        throw GeometryError("phantom: radii must be >= 2 * blend_width");
    }
    if (!(intensity_peak > 0.0)) throw GeometryError("phantom: intensity_peak must be > 0");
    if (!(merge_frame_fraction > 0.0) || merge_frame_fraction > 1.0) {
        throw GeometryError("phantom: merge_frame_fraction must be in (0, 1]");
    }
}

void EnsembleSpec::validate() const {
    if (n_experiments < 1) throw GeometryError("ensemble: n_experiments must be >= 1");
    if (!(variation_fraction >= 0.0) || variation_fraction >= 1.0) {
        throw GeometryError("ensemble: variation_fraction must be in [0, 1)");
    }
    if (dims.size() == 0) throw GeometryError("ensemble: dims must be positive");
    base_params.validate();
}

DropletState droplet_state(const PhantomParams& params, Dims4 dims, std::uint32_t t) {
    const std::array<double, 3> centre = {0.5 * (dims.x - 1.0), 0.5 * (dims.y - 1.0),
                                          0.5 * (dims.z - 1.0)};
    const double last = dims.t > 1 ? double(dims.t - 1) : 0.0;
    const double merge_frame = std::round(params.merge_frame_fraction * last);
    const double half_sep = params.speed * std::max(merge_frame - double(t), 0.0);
    const double contact = 0.5 * (params.radius_a + params.radius_b);

    DropletState s{centre, centre, 0.0, std::cbrt(std::pow(params.radius_a, 3) +
                                                  std::pow(params.radius_b, 3))};
    const int ax = axis_index(params.approach_axis);
    s.center_a[ax] -= half_sep;
    s.center_b[ax] += half_sep;
    const double w = std::clamp((contact - half_sep) / contact, 0.0, 1.0);
    s.merge_weight = w * w * (3.0 - 2.0 * w);  // smoothstep
    return s;
}

double density(const PhantomParams& params, const DropletState& state, std::array<double, 3> p) {
    const double phi_a = params.radius_a - distance(p, state.center_a);
    const double phi_b = params.radius_b - distance(p, state.center_b);
    double phi = soft_max(phi_a, phi_b, params.blend_width);
    if (state.merge_weight > 0.0) {
        const std::array<double, 3> mid = {0.5 * (state.center_a[0] + state.center_b[0]),
                                           0.5 * (state.center_a[1] + state.center_b[1]),
                                           0.5 * (state.center_a[2] + state.center_b[2])};
        const double phi_m = state.merged_radius - distance(p, mid);
        phi = (1.0 - state.merge_weight) * phi + state.merge_weight * phi_m;
    }
    return params.intensity_peak * logistic(phi / params.blend_width);
}

Volume4D generate_experiment(const PhantomParams& params, Dims4 dims, double spacing_dx,
                             double frame_dt) {
    params.validate();
    for (std::uint32_t t = 0; t < dims.t; ++t) {
        const DropletState s = droplet_state(params, dims, t);
        const bool ok_a = sphere_inside(s.center_a, params.radius_a, dims);
        const bool ok_b = sphere_inside(s.center_b, params.radius_b, dims);
        const std::array<double, 3> mid = {0.5 * (s.center_a[0] + s.center_b[0]),
                                           0.5 * (s.center_a[1] + s.center_b[1]),
                                           0.5 * (s.center_a[2] + s.center_b[2])};
        const bool ok_m = s.merge_weight == 0.0 || sphere_inside(mid, s.merged_radius, dims);
        if (!ok_a || !ok_b || !ok_m) {
            throw GeometryError("phantom: droplet leaves the grid at frame " + std::to_string(t));
        }
    }

    std::vector<float> data(dims.size());
    const std::size_t fs = dims.frame_size();
    const auto frames = static_cast<long>(dims.t);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < frames; ++t) {
        const DropletState s = droplet_state(params, dims, static_cast<std::uint32_t>(t));
        float* out = data.data() + static_cast<std::size_t>(t) * fs;
        std::size_t i = 0;
        for (std::uint32_t x = 0; x < dims.x; ++x) {
            for (std::uint32_t y = 0; y < dims.y; ++y) {
                for (std::uint32_t z = 0; z < dims.z; ++z) {
                    out[i++] = static_cast<float>(density(params, s, {double(x), double(y), double(z)}));
                }
            }
        }
    }
    return Volume4D(dims, spacing_dx, frame_dt, std::move(data));
}

PhantomParams perturb(const PhantomParams& base, double variation_fraction, std::uint64_t seed) {
    Rng rng(seed);
    const double lo = 1.0 - variation_fraction, hi = 1.0 + variation_fraction;
    PhantomParams p = base;
    p.radius_a = base.radius_a * rng.uniform(lo, hi);
    p.radius_b = base.radius_b * rng.uniform(lo, hi);
    p.speed = base.speed * rng.uniform(lo, hi);
    p.seed = seed;
    return p;
}

std::vector<PhantomParams> ensemble_params(const EnsembleSpec& spec) {
    spec.validate();
    std::vector<PhantomParams> out;
    out.reserve(spec.n_experiments);
    for (std::uint32_t e = 0; e < spec.n_experiments; ++e) {
        out.push_back(perturb(spec.base_params, spec.variation_fraction,
                              derive_seed(spec.master_seed, "experiment", e)));
    }
    return out;
}

std::vector<Volume4D> generate_ensemble(const EnsembleSpec& spec) {
    std::vector<Volume4D> out;
    const auto params = ensemble_params(spec);
    out.reserve(params.size());
    for (std::size_t e = 0; e < params.size(); ++e) {
        try {
            out.push_back(generate_experiment(params[e], spec.dims, spec.spacing_dx, spec.frame_dt));
        } catch (const GeometryError& err) {
            throw GeometryError("experiment " + std::to_string(e) + ": " + err.what());
        }
    }
    return out;
}

}  // namespace hsv::phantom
