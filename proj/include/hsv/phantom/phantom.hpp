#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hsv/core/volume4d.hpp"

namespace hsv::phantom {

enum class Axis { x, y, z };

/// Two-droplet approach / collide / coalesce model. Lengths in voxels, speed in voxels per frame.
struct PhantomParams {
    double radius_a = 5.5;
    double radius_b = 5.5;
    double speed = 0.5;
    Axis approach_axis = Axis::x;
    double blend_width = 0.25;
    double intensity_peak = 1.0;
    /// Fraction of the sequence (0..1] after which the two centres coincide.
    double merge_frame_fraction = 0.65;
    std::uint64_t seed = 0;

    /// Throws GeometryError when speed, radii or blend width are out of range.
    void validate() const;
};

struct EnsembleSpec {
    std::uint32_t n_experiments = 8;
    double variation_fraction = 0.10;
    PhantomParams base_params{};
    Dims4 dims{24, 32, 32, 32};
    double spacing_dx = 1.0;
    double frame_dt = 1.0;
    std::uint64_t master_seed = 1;

    void validate() const;
};

struct DropletState {
    std::array<double, 3> center_a;
    std::array<double, 3> center_b;
    /// 0 before contact, 1 once fully coalesced.
    double merge_weight;
    double merged_radius;
};

/// Analytic droplet positions at frame t.
DropletState droplet_state(const PhantomParams& params, Dims4 dims, std::uint32_t t);

/// Density at point p (voxel coordinates) for a given state. Values in [0, intensity_peak].
double density(const PhantomParams& params, const DropletState& state, std::array<double, 3> p);

/// Samples the density on the grid for every frame.
/// Throws GeometryError naming the first frame at which a droplet leaves the grid
/// or the inscribed cylinder about z.
Volume4D generate_experiment(const PhantomParams& params, Dims4 dims, double spacing_dx = 1.0,
                             double frame_dt = 1.0);

/// Radii and speed scaled by independent factors drawn uniformly from
/// [1 - variation, 1 + variation] with a generator seeded from `seed`.
PhantomParams perturb(const PhantomParams& base, double variation_fraction, std::uint64_t seed);

/// Per-experiment parameters, deterministic in master_seed.
std::vector<PhantomParams> ensemble_params(const EnsembleSpec& spec);

std::vector<Volume4D> generate_ensemble(const EnsembleSpec& spec);

}  // namespace hsv::phantom
