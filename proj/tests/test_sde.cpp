#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "reflectics/rng.hpp"
#include "reflectics/run_config.hpp"
#include "reflectics/runner.hpp"
#include "reflectics/sde.hpp"

using namespace reflectics;

namespace {

DynamicsSpec half_line(double drift = 0.0, double theta = 1.0) {
    std::vector<Constraint> cs;
    cs.push_back({"wall", [](const Vec& x) { return x(0); },
                  [](const Vec&) { return Vec(Vec::Ones(1)); }, 0.0, 1.0});
    ConstraintSet set(std::move(cs), 1, Mat(theta * Mat::Identity(1, 1)));
    const Mat sigma = set.obliquity();
    return DynamicsSpec{std::move(set), [sigma](const Vec&) { return sigma; },
                        [drift](const Vec&) { return Vec(Vec::Constant(1, drift)); },
                        "constant coefficients"};
}

DynamicsSpec wedge_dynamics(double angle_deg) {
    RunConfig cfg;
    cfg.domain = "wedge";
    cfg.wedge_angle_deg = angle_deg;
    return domain_dynamics(cfg);
}

}  // namespace

TEST_CASE("interior step: prediction untouched, no local time") {
    const DynamicsSpec spec = half_line();
    Vec x(1), noise(1);
    x << 5.0;
    noise << 0.3;
    const StepResult r = step(spec, x, 0.01, noise);
    CHECK(r.x_next(0) == doctest::Approx(5.0 + 0.3 * std::sqrt(0.01)).epsilon(1e-14));
    CHECK(r.dl[0] == 0.0);
}

TEST_CASE("half-line push-back: y = -0.3 maps to 0 with dL = 0.3") {
    const DynamicsSpec spec = half_line();
    Vec x(1), noise(1);
    x << 0.1;
    noise << -0.4;  // y = 0.1 - 0.4 * sqrt(1) = -0.3
    const StepResult r = step(spec, x, 1.0, noise);
    CHECK(std::abs(r.x_next(0)) <= 1e-12);
    CHECK(r.dl[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.saw_boundary[0] == 1);
}

TEST_CASE("infeasible start rejected") {
    const DynamicsSpec spec = half_line();
    Vec x(1);
    x << -0.5;
    CHECK_THROWS_AS(step(spec, x, 0.01, Vec::Zero(1)), std::invalid_argument);
}

TEST_CASE("wedge corner correction matches the Euclidean projection oracle") {
    for (double angle : {90.0, 120.0}) {
        const DynamicsSpec spec = wedge_dynamics(angle);
        const double a = angle * M_PI / 180.0;
        RngStream rng(31, 0);
        for (int trial = 0; trial < 50; ++trial) {
            // Start at the corner-adjacent interior, fire a noise pushing out.
            Vec x(2);
            x << 0.05 + 0.1 * rng.u01(), 0.02 * (2.0 * rng.u01() - 1.0);
            if (spec.set.min_value(x) < 1e-3) continue;
            Vec noise(2);
            noise << -(1.0 + 2.0 * rng.u01()), 2.0 * (2.0 * rng.u01() - 1.0);
            const double dt = 0.01;
            const Vec y = x + spec.sigma(x) * (std::sqrt(dt) * noise);
            const StepResult r = step(spec, x, dt, noise);
            const Vec p = test::project_wedge(y, a);
            CHECK((r.x_next - p).norm() <= 1e-6);
            for (double l : r.dl) CHECK(l >= 0.0);
        }
    }
}

TEST_CASE("zero noise and drift: constant path, zero local times") {
    const DynamicsSpec spec = half_line();
    Vec x0(1);
    x0 << 1.0;
    const PathRecord rec = simulate_with_noise(spec, x0, 1.0, 0.01,
                                               [](long) { return Vec(Vec::Zero(1)); });
    for (size_t k = 0; k < rec.times.size(); ++k)
        CHECK(rec.states(static_cast<Eigen::Index>(k), 0) == 1.0);
    CHECK(rec.local_times.maxCoeff() == 0.0);
    CHECK(rec.support_violations == 0);
}

TEST_CASE("half-line with drift -1: long-run mean near 1/2") {
    // Stationary density of the potential phi(x) = 2x is 2 exp(-2x), mean 1/2.
    const DynamicsSpec spec = half_line(-1.0);
    Vec x0(1);
    x0 << 0.5;
    const PathRecord rec = simulate(spec, x0, 200.0, 1e-3, 2024);
    const size_t n = rec.times.size();
    double mean = 0.0;
    for (size_t k = n / 2; k < n; ++k) mean += rec.states(static_cast<Eigen::Index>(k), 0);
    mean /= static_cast<double>(n - n / 2);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("path record contract: feasibility, monotone local times, determinism") {
    const DynamicsSpec spec = wedge_dynamics(90.0);
    Vec x0(2);
    x0 << 0.3, 0.0;
    const PathRecord a = simulate(spec, x0, 2.0, 1e-3, 7);
    const PathRecord b = simulate(spec, x0, 2.0, 1e-3, 7);
    CHECK(a.states == b.states);
    CHECK(a.local_times == b.local_times);

    for (Eigen::Index r = 0; r < a.states.rows(); ++r)
        CHECK(spec.set.min_value(a.states.row(r).transpose()) >= -spec.set.feas_tol());
    for (Eigen::Index r = 1; r < a.local_times.rows(); ++r)
        for (Eigen::Index c = 0; c < a.local_times.cols(); ++c)
            CHECK(a.local_times(r, c) >= a.local_times(r - 1, c));
    CHECK(a.support_violations == 0);
    CHECK(a.local_times.row(0).maxCoeff() == 0.0);

    const PathRecord other_seed = simulate(spec, x0, 2.0, 1e-3, 8);
    CHECK(a.states != other_seed.states);
}

TEST_CASE("transform_dynamics: identity probes and 1D obliquity 2 pathwise order") {
    const DynamicsSpec oblique = half_line(-0.5, 2.0);
    const DynamicsSpec normal = transform_dynamics(oblique);
    CHECK(normal.set.obliquity() == Mat::Identity(1, 1));

    Philox4x32 gen(77, 0);
    auto noise_fine = [&gen](long k) {
        Vec z(1);
        gen.fill_normals(static_cast<uint64_t>(k), std::span<double>(z.data(), 1));
        return z;
    };
    // Coarse-grid noise consistent with the fine grid: the prediction event of
    // coarse step e (event 32e) bundles the predictions of the `bundle` fine
    // steps it covers; auxiliary events (retry halves, bridge refinements) get
    // independent draws from a disjoint counter range.
    auto make_coarse = [&gen](int bundle) {
        return [&gen, bundle](long event) {
            Vec z(1);
            if (event % 32 != 0) {
                gen.fill_normals(static_cast<uint64_t>(1000000000L + event),
                                 std::span<double>(z.data(), 1));
                return z;
            }
            const long e = event / 32;
            z.setZero();
            Vec tmp(1);
            for (int j = 0; j < bundle; ++j) {
                gen.fill_normals(static_cast<uint64_t>(32 * (bundle * e + j)),
                                 std::span<double>(tmp.data(), 1));
                z += tmp;
            }
            return Vec(z / std::sqrt(static_cast<double>(bundle)));
        };
    };

    auto sup_diff = [&](double dt, const NoiseSource& noise) {
        Vec x0(1), y0(1);
        x0 << 0.4;
        y0 << 0.2;  // theta^{-1} x0
        const PathRecord xo = simulate_with_noise(oblique, x0, 1.0, dt, noise);
        const PathRecord xn = simulate_with_noise(normal, y0, 1.0, dt, noise);
        double sup = 0.0;
        for (size_t k = 0; k < xo.times.size(); ++k)
            sup = std::max(sup, std::abs(xo.states(static_cast<Eigen::Index>(k), 0) -
                                         2.0 * xn.states(static_cast<Eigen::Index>(k), 0)));
        return sup;
    };

    const double e_coarse = sup_diff(4e-3, make_coarse(4));
    const double e_fine = sup_diff(1e-3, noise_fine);
    CHECK(e_fine < e_coarse + 1e-12);
    CHECK(e_coarse < 0.5);  // sanity: the two systems track each other
}
