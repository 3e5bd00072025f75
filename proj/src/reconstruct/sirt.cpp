#include "hsv/reconstruct/sirt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "hsv/error.hpp"
#include "hsv/kernels/projection_kernels.hpp"

namespace hsv::reconstruct {
namespace {

// Views grouped by distinct angle: summed data, multiplicity, and sum of squared norms.
struct AngleGroup {
    kernels::RotationTable table;
    std::vector<double> data_sum;
    double multiplicity = 0.0;
    double data_norm2 = 0.0;
    std::vector<double> row_weight;  // 1 / row sum, 0 where the row sum vanishes
};

std::vector<AngleGroup> group_views(std::span<const AngleView> views, Dims3 dims) {
    std::map<double, std::vector<const AngleView*>> by_angle;
    for (const AngleView& v : views) by_angle[v.angle_deg].push_back(&v);

    std::vector<AngleGroup> groups;
    groups.reserve(by_angle.size());
    const std::vector<double> ones(dims.size(), 1.0);
    for (const auto& [angle, members] : by_angle) {
        AngleGroup g;
        g.table = kernels::build_rotation_table(dims, angle);
        g.data_sum.assign(g.table.image_size(), 0.0);
        for (const AngleView* v : members) {
            for (std::size_t i = 0; i < g.data_sum.size(); ++i) {
                const double b = v->pixels[i];
                g.data_sum[i] += b;
                g.data_norm2 += b * b;
            }
        }
        g.multiplicity = static_cast<double>(members.size());
        g.row_weight.resize(g.table.image_size());
        kernels::serial::forward(g.table, ones, g.row_weight);
        for (double& w : g.row_weight) w = w > 1e-12 ? 1.0 / w : 0.0;
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace

void SolverConfig::validate() const {
    if (n_iterations == 0) throw DomainError("SolverConfig: n_iterations must be positive");
    if (!(relaxation > 0.0) || relaxation > 2.0) {
        throw DomainError("SolverConfig: relaxation must be in (0, 2]");
    }
    if (!(stop_tol >= 0.0)) throw DomainError("SolverConfig: stop_tol must be >= 0");
}

std::vector<double> backproject_frame(std::span<const double> image, double angle_deg, Dims3 dims) {
    if (image.size() != static_cast<std::size_t>(dims.y) * dims.z) {
        throw DimensionMismatch("backproject_frame: image must be Y x Z = " +
                                std::to_string(dims.y) + " x " + std::to_string(dims.z));
    }
    const auto table = kernels::build_rotation_table(dims, angle_deg);
    std::vector<double> out(dims.size());
    kernels::parallel::adjoint(table, image, out);
    return out;
}

FrameResult sirt_frame(std::span<const AngleView> views, Dims3 dims, const SolverConfig& config) {
    config.validate();
    if (views.empty()) throw DomainError("sirt: empty angle list");
    const std::size_t img_size = static_cast<std::size_t>(dims.y) * dims.z;
    for (const AngleView& v : views) {
        if (v.pixels.size() != img_size) throw DimensionMismatch("sirt: detector dims mismatch");
    }

    auto groups = group_views(views, dims);
    const std::size_t n = dims.size();

    // Column weights: inverse of A^T 1 with rows counted by multiplicity.
    std::vector<double> col_weight(n, 0.0);
    std::vector<double> tmp(n);
    {
        std::vector<double> ones(img_size, 1.0);
        for (const AngleGroup& g : groups) {
            kernels::serial::adjoint(g.table, ones, tmp);
            for (std::size_t i = 0; i < n; ++i) col_weight[i] += g.multiplicity * tmp[i];
        }
        for (double& c : col_weight) c = c > 1e-12 ? config.relaxation / c : 0.0;
    }

    FrameResult result;
    result.volume.assign(n, 0.0);
    std::vector<double>& x = result.volume;
    std::vector<double> ax(img_size);
    std::vector<double> update(n);

    auto residual_of_current = [&](bool accumulate) {
        double r2 = 0.0;
        if (accumulate) std::fill(update.begin(), update.end(), 0.0);
        for (AngleGroup& g : groups) {
            kernels::serial::forward(g.table, x, ax);
            double cross = 0.0, self = 0.0;
            for (std::size_t i = 0; i < img_size; ++i) {
                cross += g.data_sum[i] * ax[i];
                self += ax[i] * ax[i];
                ax[i] = (g.data_sum[i] - g.multiplicity * ax[i]) * g.row_weight[i];
            }
            r2 += g.data_norm2 - 2.0 * cross + g.multiplicity * self;
            if (accumulate) {
                kernels::serial::adjoint(g.table, ax, tmp);
                for (std::size_t i = 0; i < n; ++i) update[i] += tmp[i];
            }
        }
        return std::sqrt(std::max(r2, 0.0));
    };

    for (std::uint32_t k = 0; k < config.n_iterations; ++k) {
        const double r = residual_of_current(true);
        result.residuals.push_back(r);
        if (r == 0.0) return result;
        if (k > 0) {
            const double prev = result.residuals[k - 1];
            if (std::abs(prev - r) / prev < config.stop_tol) return result;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double v = x[i] + col_weight[i] * update[i];
            if (config.nonneg_clamp && v < 0.0) v = 0.0;
            x[i] = v;
        }
    }
    result.residuals.push_back(residual_of_current(false));
    return result;
}

Volume4D sirt_reconstruct(std::span<const projector::ProjectionSet> sets, const SolverConfig& config,
                          Dims4 dims, double spacing_dx, double frame_dt) {
    config.validate();
    if (sets.empty()) throw DomainError("sirt: no projection sets supplied");
    for (const auto& s : sets) {
        if (s.angles_deg.empty()) throw DomainError("sirt: empty angle list");
        if (s.frames != dims.t) throw DimensionMismatch("sirt: frame count differs from requested T");
        if (s.detector_u != dims.y || s.detector_v != dims.z) {
            throw DimensionMismatch("sirt: inconsistent detector dims across sets");
        }
    }
    const Dims3 d3 = spatial(dims);
    const std::size_t fs = dims.frame_size();
    std::vector<float> data(dims.size());

    const auto frames = static_cast<long>(dims.t);
#pragma omp parallel for schedule(dynamic, 1)
    for (long t = 0; t < frames; ++t) {
        std::vector<AngleView> views;
        for (const auto& s : sets) {
            for (std::size_t a = 0; a < s.n_angles(); ++a) {
                views.push_back({s.angles_deg[a], s.image(static_cast<std::size_t>(t), a)});
            }
        }
        const FrameResult r = sirt_frame(views, d3, config);
        std::transform(r.volume.begin(), r.volume.end(), data.begin() + t * fs,
                       [](double v) { return static_cast<float>(v); });
    }
    return Volume4D(dims, spacing_dx, frame_dt, std::move(data));
}

SirtReconstructor::SirtReconstructor(SolverConfig config) : config_(config) { config_.validate(); }

Volume4D SirtReconstructor::reconstruct(std::span<const projector::ProjectionSet> sets, Dims4 dims,
                                        double spacing_dx, double frame_dt) const {
    return sirt_reconstruct(sets, config_, dims, spacing_dx, frame_dt);
}

Volume4D reconstruct_pseudo_reference(const Reconstructor& reconstructor,
                                      std::span<const projector::ProjectionSet> all_sets, Dims4 dims,
                                      double spacing_dx, double frame_dt) {
    return reconstructor.reconstruct(all_sets, dims, spacing_dx, frame_dt);
}

}  // namespace hsv::reconstruct
