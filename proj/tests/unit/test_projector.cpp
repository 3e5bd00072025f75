#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hsv/error.hpp"
#include "hsv/projector/angles.hpp"
#include "hsv/projector/projection_io.hpp"
#include "hsv/projector/projector.hpp"
#include "hsv/reconstruct/sirt.hpp"
#include "oracles.hpp"

using namespace hsv;
using namespace hsv::projector;

namespace {
std::vector<float> ball(Dims3 d, double r, double value = 1.0) {
    std::vector<float> f(d.size());
    const double cx = 0.5 * (d.x - 1), cy = 0.5 * (d.y - 1), cz = 0.5 * (d.z - 1);
    for (std::uint32_t x = 0; x < d.x; ++x)
        for (std::uint32_t y = 0; y < d.y; ++y)
            for (std::uint32_t z = 0; z < d.z; ++z) {
                const double rr = std::hypot(x - cx, y - cy, z - cz);
                f[d.index(x, y, z)] = rr <= r ? float(value) : 0.0f;
            }
    return f;
}

double rms(const std::vector<double>& a) {
    double s = 0;
    for (double x : a) s += x * x;
    return std::sqrt(s / a.size());
}

std::vector<double> uniform_doubles(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    return v;
}
}  // namespace

TEST_CASE("evenly spaced angles") {
    CHECK(evenly_spaced_angles(2, 0) == std::vector<double>{0, 90});
    const auto all = evenly_spaced_angles(16, 0);
    REQUIRE(all.size() == 16);
    for (int m = 0; m < 16; ++m) CHECK(all[m] == m * 11.25);
    CHECK(evenly_spaced_angles(4, 1) == std::vector<double>{11.25, 56.25, 101.25, 146.25});
    try {
        evenly_spaced_angles(1, 0);
        FAIL("expected SamplingError");
    } catch (const SamplingError& e) {
        CHECK(std::string(e.what()).find("single") != std::string::npos);
    }
    CHECK_THROWS_AS(evenly_spaced_angles(4, 4), SamplingError);
    CHECK_NOTHROW(evenly_spaced_angles(8, 1));
}

TEST_CASE("ultra-sparse angle table") {
    CHECK(ultra_sparse_angles(1) == std::vector<double>{0, 45, 90, 135});
    CHECK(ultra_sparse_angles(4) == std::vector<double>{33.75, 78.75, 123.75, 168.75});
    CHECK(ultra_sparse_angles(5) == std::vector<double>{45, 90, 135, 0});
    const double rows[16][4] = {
        {0, 45, 90, 135},          {11.25, 56.25, 101.25, 146.25}, {22.5, 67.5, 112.5, 157.5},
        {33.75, 78.75, 123.75, 168.75}, {45, 90, 135, 0},          {56.25, 101.25, 146.25, 11.25},
        {67.5, 112.5, 157.5, 22.5},    {78.75, 123.75, 168.75, 33.75}, {0, 45, 90, 135},
        {11.25, 56.25, 101.25, 146.25}, {22.5, 67.5, 112.5, 157.5}, {33.75, 78.75, 123.75, 168.75},
        {45, 90, 135, 0},          {56.25, 101.25, 146.25, 11.25}, {67.5, 112.5, 157.5, 22.5},
        {78.75, 123.75, 168.75, 33.75}};
    for (std::uint32_t e = 1; e <= 16; ++e) {
        CAPTURE(e);
        CHECK(ultra_sparse_angles(e) == std::vector<double>(rows[e - 1], rows[e - 1] + 4));
    }
    CHECK_THROWS_AS(ultra_sparse_angles(0), SamplingError);
    CHECK_THROWS_AS(ultra_sparse_angles(17), SamplingError);
    CHECK(grid_index(168.75) == 15);
    CHECK_THROWS(grid_index(10.0));
}

TEST_CASE("axis-aligned box projects to its depth") {
    const Dims3 d{16, 16, 16};
    std::vector<float> f(d.size());
    for (std::uint32_t x = 5; x < 11; ++x)
        for (std::uint32_t y = 4; y < 12; ++y)
            for (std::uint32_t z = 6; z < 10; ++z) f[d.index(x, y, z)] = 1;
    const auto img = project_frame(f, d, 0.0);
    CHECK(img[5 * 16 + 7] == doctest::Approx(6.0));
    CHECK(img[0 * 16 + 0] == 0.0);
    CHECK(img[14 * 16 + 7] == 0.0);
}

TEST_CASE("ball projections are rotation invariant and conserve mass") {
    const Dims3 d{32, 32, 32};
    const auto f = ball(d, 9.0);
    const auto p0 = project_frame(f, d, 0.0);
    const auto p90 = project_frame(f, d, 90.0);
    std::vector<double> diff(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) diff[i] = p0[i] - p90[i];
    CHECK(rms(diff) / rms(p0) <= 1e-3);

    double mass = 0;
    for (float x : f) mass += x;
    for (double a : {0.0, 11.25, 33.75, 45.0, 78.75, 123.75, 168.75}) {
        const auto p = project_frame(f, d, a);
        double total = 0;
        for (double x : p) total += x;
        CAPTURE(a);
        CHECK(std::abs(total - mass) / mass <= 0.005);
    }
}

TEST_CASE("projection is linear") {
    const Dims3 d{12, 12, 8};
    const auto v1 = oracle::random_volume({1, 12, 12, 8}, 1);
    const auto v2 = oracle::random_volume({1, 12, 12, 8}, 2);
    const double a = 0.7, b = -1.3;
    std::vector<float> mix(d.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = float(a * v1.data()[i] + b * v2.data()[i]);
    const auto pm = project_frame(mix, d, 37.0);
    const auto p1 = project_frame(v1.data(), d, 37.0);
    const auto p2 = project_frame(v2.data(), d, 37.0);
    double err = 0, norm = 0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        err = std::max(err, std::abs(pm[i] - (a * p1[i] + b * p2[i])));
        norm = std::max(norm, std::abs(pm[i]));
    }
    // mix is rounded to float, so the tolerance is float epsilon relative.
    CHECK(err / norm <= 1e-6);

    std::vector<float> mix_exact(d.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix_exact[i] = 2.0f * v1.data()[i];
    const auto p2x = project_frame(mix_exact, d, 37.0);
    for (std::size_t i = 0; i < p2x.size(); ++i) CHECK(p2x[i] == doctest::Approx(2 * p1[i]).epsilon(1e-9));
}

TEST_CASE("backprojection is the adjoint of projection") {
    const Dims3 d{16, 16, 16};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto x = uniform_doubles(d.size(), seed);
        const auto y = uniform_doubles(std::size_t{d.y} * d.z, seed + 100);
        std::vector<float> xf(x.begin(), x.end());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = xf[i];
        const double angle = Rng(seed).uniform(0, 180);
        const auto ax = project_frame(xf, d, angle);
        const auto aty = reconstruct::backproject_frame(y, angle, d);
        double lhs = 0, rhs = 0, nax = 0, ny = 0;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            lhs += ax[i] * y[i];
            nax += ax[i] * ax[i];
            ny += y[i] * y[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
        CHECK(std::abs(lhs - rhs) / std::sqrt(nax * ny) <= 1e-4);
    }
}

TEST_CASE("acquire") {
    const auto v = oracle::random_volume({24, 8, 8, 8}, 5);
    const auto angles = evenly_spaced_angles(16, 0);
    const auto set = acquire(v, angles, true, 3);
    CHECK(set.frames == 24);
    CHECK(set.n_angles() == 16);
    CHECK(set.pixels.size() == 24 * 16 * 64);
    for (float p : set.pixels) CHECK(p >= 0.0f);

    const std::vector<std::size_t> pick = {2, 6, 10, 14};
    std::vector<double> sub;
    for (auto i : pick) sub.push_back(angles[i]);
    CHECK(set.select_angles(pick) == acquire(v, sub, true, 3));

    const auto zero = acquire(Volume4D::zeros({2, 8, 8, 8}), angles, false);
    for (float p : zero.pixels) CHECK(p == 0.0f);
    CHECK_FALSE(zero.geometry_known);

    CHECK_THROWS_AS(acquire(v, std::vector<double>{0, 0}, true), SamplingError);
    CHECK_THROWS_AS(acquire(v, std::vector<double>{180}, true), SamplingError);
    CHECK_THROWS_AS(acquire(v, std::vector<double>{}, true), SamplingError);
}

TEST_CASE("PRJ4D round trip and errors") {
    const auto v = oracle::random_volume({3, 6, 5, 4}, 8);
    const auto set = acquire(v, ultra_sparse_angles(6), false, 6);
    std::stringstream ss;
    write_projections(set, ss);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == kProjectionHeaderSize + 4 * 8 + 4 * set.pixels.size());
    CHECK(read_projections(ss) == set);

    std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_projections(truncated), FormatError);
    std::string bad = bytes;
    bad[28] = 7;
    std::istringstream bad_flag(bad);
    CHECK_THROWS_AS(read_projections(bad_flag), FormatError);
}
