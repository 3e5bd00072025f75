#include <cmath>

#include "doctest.h"
#include "hsv/error.hpp"
#include "hsv/phantom/phantom.hpp"
#include "hsv/projector/angles.hpp"
#include "hsv/reconstruct/sirt.hpp"
#include "oracles.hpp"

using namespace hsv;
using namespace hsv::reconstruct;

namespace {
Volume4D ball_volume(Dims4 d, double r) {
    std::vector<float> f(d.size());
    const double c[3] = {0.5 * (d.x - 1), 0.5 * (d.y - 1), 0.5 * (d.z - 1)};
    std::size_t i = 0;
    for (std::uint32_t t = 0; t < d.t; ++t)
        for (std::uint32_t x = 0; x < d.x; ++x)
            for (std::uint32_t y = 0; y < d.y; ++y)
                for (std::uint32_t z = 0; z < d.z; ++z, ++i)
                    f[i] = std::hypot(x - c[0], y - c[1], z - c[2]) <= r ? 1.0f : 0.0f;
    return Volume4D(d, 1, 1, std::move(f));
}

std::vector<AngleView> views_of(const projector::ProjectionSet& s, std::size_t t) {
    std::vector<AngleView> out;
    for (std::size_t a = 0; a < s.n_angles(); ++a) out.push_back({s.angles_deg[a], s.image(t, a)});
    return out;
}
}  // namespace

TEST_CASE("backprojection basics") {
    const Dims3 d{6, 5, 4};
    const auto zero = backproject_frame(std::vector<double>(20, 0.0), 30.0, d);
    for (double x : zero) CHECK(x == 0.0);

    std::vector<double> onehot(20, 0.0);
    onehot[2 * 4 + 1] = 1.0;  // (u=2, v=1)
    const auto line = backproject_frame(onehot, 0.0, d);
    for (std::uint32_t x = 0; x < d.x; ++x)
        for (std::uint32_t y = 0; y < d.y; ++y)
            for (std::uint32_t z = 0; z < d.z; ++z)
                CHECK(line[d.index(x, y, z)] == (y == 2 && z == 1 ? 1.0 : 0.0));

    CHECK_THROWS_AS(backproject_frame(std::vector<double>(19), 0.0, d), DimensionMismatch);
}

TEST_CASE("SIRT recovers a ball from 16 angles") {
    const auto truth = ball_volume({1, 16, 16, 16}, 5.0);
    const auto set = projector::acquire(truth, projector::evenly_spaced_angles(16, 0), true);
    SolverConfig cfg;
    cfg.stop_tol = 0;
    const auto rec = sirt_reconstruct(std::span(&set, 1), cfg, truth.dims());
    CHECK(oracle::ncc(rec, truth) >= 0.95);
    for (float x : rec.data()) CHECK(x >= 0.0f);
}

TEST_CASE("residual decreases monotonically") {
    const auto truth = ball_volume({1, 16, 16, 16}, 5.0);
    for (std::uint32_t n : {2u, 16u}) {
        const auto set = projector::acquire(truth, projector::evenly_spaced_angles(n, 0), true);
        for (double relax : {0.5, 1.0}) {
            for (bool clamp : {false, true}) {
                SolverConfig cfg;
                cfg.stop_tol = 0;
                cfg.n_iterations = 20;
                cfg.relaxation = relax;
                cfg.nonneg_clamp = clamp;
                const auto views = views_of(set, 0);
                const auto r = sirt_frame(views, {16, 16, 16}, cfg);
                REQUIRE(r.residuals.size() == 21);
                for (std::size_t k = 1; k < r.residuals.size(); ++k) {
                    CAPTURE(n);
                    CAPTURE(k);
                    CHECK(r.residuals[k] <= r.residuals[k - 1] * (1 + 1e-12));
                }
            }
        }
    }
}

TEST_CASE("residual trace matches a direct evaluation") {
    const auto truth = oracle::random_volume({1, 10, 10, 6}, 3);
    const auto set = projector::acquire(truth, std::vector<double>{0, 30, 90}, true);
    SolverConfig cfg;
    cfg.n_iterations = 5;
    cfg.stop_tol = 0;
    const auto views = views_of(set, 0);
    const auto r = sirt_frame(views, {10, 10, 6}, cfg);
    const std::vector<float> xf(r.volume.begin(), r.volume.end());
    double direct = 0;
    for (std::size_t a = 0; a < 3; ++a) {
        const auto ax = projector::project_frame(std::vector<float>(r.volume.begin(), r.volume.end()), {10, 10, 6},
                                                 set.angles_deg[a]);
        for (std::size_t i = 0; i < ax.size(); ++i) {
            const double e = set.image(0, a)[i] - ax[i];
            direct += e * e;
        }
    }
    // float rounding of the iterate enters the direct evaluation
    CHECK(r.residuals.back() == doctest::Approx(std::sqrt(direct)).epsilon(1e-5));
}

TEST_CASE("zero data with clamp stays zero") {
    const auto set = projector::acquire(Volume4D::zeros({2, 8, 8, 8}), projector::evenly_spaced_angles(4, 0), true);
    const auto rec = sirt_reconstruct(std::span(&set, 1), SolverConfig{}, {2, 8, 8, 8});
    for (float x : rec.data()) CHECK(x == 0.0f);
}

TEST_CASE("pooling and reference properties") {
    phantom::PhantomParams p;
    p.speed = 0;
    const Dims4 d{3, 16, 16, 16};
    p.radius_a = p.radius_b = 3.0;
    const auto truth = phantom::generate_experiment(p, d);
    std::vector<projector::ProjectionSet> sets = {
        projector::acquire(truth, projector::evenly_spaced_angles(4, 0), true, 1),
        projector::acquire(truth, projector::evenly_spaced_angles(4, 1), true, 2)};
    const SirtReconstructor sirt(SolverConfig{});
    const auto ref = reconstruct_pseudo_reference(sirt, sets, d);
    CHECK(ref == reconstruct_pseudo_reference(sirt, sets, d));
    for (std::size_t t = 1; t < d.t; ++t) {
        const auto a = ref.frame(0), b = ref.frame(t);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    const auto one = sirt.reconstruct(std::span(sets.data(), 1), d, 1, 1);
    CHECK(oracle::ncc(ref, truth) > oracle::ncc(one, truth));

    // Duplicated views pool with multiplicity but do not change the fixed point direction.
    std::vector<projector::ProjectionSet> doubled = {sets[0], sets[0]};
    const auto twice = sirt.reconstruct(doubled, d, 1, 1);
    CHECK(oracle::ncc(twice, one) > 0.9999);

    auto bad = sets[1];
    bad.detector_u = 8;
    bad.pixels.resize(bad.frames * bad.n_angles() * 8 * 16);
    std::vector<projector::ProjectionSet> mixed = {sets[0], bad};
    CHECK_THROWS_AS(sirt.reconstruct(mixed, d, 1, 1), DimensionMismatch);
    CHECK_THROWS(SolverConfig{0}.validate());
    SolverConfig over;
    over.relaxation = 2.5;
    CHECK_THROWS(over.validate());
}
