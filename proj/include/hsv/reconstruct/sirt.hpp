#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hsv/core/volume4d.hpp"
#include "hsv/projector/projector.hpp"

namespace hsv::reconstruct {

struct SolverConfig {
    std::uint32_t n_iterations = 50;
    double relaxation = 1.0;  // (0, 2]
    bool nonneg_clamp = true;
    /// Stop once |r_k - r_{k-1}| / r_{k-1} falls below this.
    double stop_tol = 1e-4;

    void validate() const;
};

/// Adjoint of projector::project_frame. `image` is Y x Z.
std::vector<double> backproject_frame(std::span<const double> image, double angle_deg, Dims3 dims);

/// One detector image together with its acquisition angle.
struct AngleView {
    double angle_deg;
    std::span<const float> pixels;
};

struct FrameResult {
    std::vector<double> volume;
    /// ||b - A x_k||_2 for x_0 = 0 and each subsequent iterate.
    std::vector<double> residuals;
};

/// SIRT on a single frame: x <- clamp(x + relaxation * C A^T R (b - A x)).
/// Views sharing an angle are pooled (their rows enter with multiplicity).
FrameResult sirt_frame(std::span<const AngleView> views, Dims3 dims, const SolverConfig& config);

/// Frame-by-frame SIRT over the union of all supplied sets. Every set must
/// have dims.t frames and a Y x Z detector.
Volume4D sirt_reconstruct(std::span<const projector::ProjectionSet> sets, const SolverConfig& config,
                          Dims4 dims, double spacing_dx = 1.0, double frame_dt = 1.0);

/// F(P) -> y_hat. Implementations must be deterministic in their inputs.
class Reconstructor {
public:
    virtual ~Reconstructor() = default;
    virtual Volume4D reconstruct(std::span<const projector::ProjectionSet> sets, Dims4 dims,
                                 double spacing_dx, double frame_dt) const = 0;
    virtual std::string name() const = 0;
};

class SirtReconstructor final : public Reconstructor {
public:
    explicit SirtReconstructor(SolverConfig config);

    Volume4D reconstruct(std::span<const projector::ProjectionSet> sets, Dims4 dims,
                         double spacing_dx, double frame_dt) const override;
    std::string name() const override { return "sirt"; }

    const SolverConfig& config() const noexcept { return config_; }

private:
    SolverConfig config_;
};

/// Reconstruction from all available data, used as the pseudo-reference y_full.
Volume4D reconstruct_pseudo_reference(const Reconstructor& reconstructor,
                                      std::span<const projector::ProjectionSet> all_sets, Dims4 dims,
                                      double spacing_dx = 1.0, double frame_dt = 1.0);

}  // namespace hsv::reconstruct
