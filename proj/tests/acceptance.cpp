// Acceptance harness: nine end-to-end checks, one pass/fail line each.
// Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reflectics/compat.hpp"
#include "reflectics/gibbs.hpp"
#include "reflectics/hull.hpp"
#include "reflectics/planet.hpp"
#include "reflectics/rng.hpp"
#include "reflectics/run_config.hpp"
#include "reflectics/runner.hpp"
#include "reflectics/sde.hpp"
#include "reflectics/stats.hpp"

using namespace reflectics;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const char* title, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%d] %s %s: %s (%.1f s)\n", number, pass ? "PASS" : "FAIL", title,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename F>
void criterion(int number, const char* title, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, title, pass, detail, secs);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

planet::PlanetModel make_planet(int n, double tau) {
    planet::PlanetModel m;
    m.n = n;
    m.d = 2;
    m.R = 1.0;
    m.r_minus = 0.1;
    m.r_plus = 0.2;
    m.temperature = tau;
    m.gravity = planet::log_gravity(3.0);
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) return "<missing:" + p.string() + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- 1: hull solver vs grid-search oracles ---------------------------------

bool crit_hull(std::string& detail) {
    double worst_dist = 0.0, worst_beta = 0.0, worst_dual = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + trial % 2;
        const int m = 1 + trial % 6;
        const auto us = test::random_unit_vectors(dim, m, 50000 + static_cast<uint64_t>(trial));
        const HullResult r = min_norm_in_hull(us);
        const ConeResult c = cone_axis(us);

        worst_dist = std::max(worst_dist, std::abs(r.distance - test::simplex_min_norm_oracle(us)));
        const double maxmin = test::sphere_maxmin_oracle(us);
        if (c.degenerate) {
            worst_beta = std::max(worst_beta, maxmin);  // oracle must agree: no positive aperture
        } else {
            worst_dual = std::max(worst_dual, std::abs(c.beta - r.distance));
            worst_beta = std::max(worst_beta, std::abs(c.beta - maxmin));
        }
    }
    detail = "max |dist-beta| " + fmt(worst_dual) + ", vs oracles " + fmt(worst_dist) + " / " +
             fmt(worst_beta);
    return worst_dual <= 1e-6 && worst_dist <= 1e-3 && worst_beta <= 1e-3;
}

// --- 2: planet compatibility certificate at sampled boundary points --------

bool crit_planet_cert(std::string& detail) {
    const planet::PlanetModel m = make_planet(3, 0.5);
    const ConstraintSet set = planet::build_constraints(m);
    const GibbsSpec gspec = planet::gibbs_spec(m);
    BoundarySampler sampler(set, gspec.envelope_lo, gspec.envelope_hi, 20260824);

    const CompatReport rep = check_compatibility(set, sampler, 10000);
    if (rep.verdict != CompatVerdict::CertifiedAtSamples || rep.beta0_estimate <= 0.0) {
        detail = "not certified, beta0 " + fmt(rep.beta0_estimate);
        return false;
    }

    long checked = 0, violations = 0;
    const double root_half = 1.0 / std::sqrt(2.0);
    for (uint64_t idx = 0; idx < 400000 && checked < 10000; ++idx) {
        const auto p = sampler.sample(idx);
        if (!p) continue;
        ++checked;
        const planet::ConeCertificate cert = planet::cone_vector(*p, m, set.act_tol());
        bool ok = cert.v_sq <= cert.v_sq_bound + 1e-9;
        for (const auto& [id, inner] : cert.inner) {
            if (id.rfind("planet:", 0) == 0) ok = ok && inner >= m.R * root_half - 1e-6;
            else if (id.rfind("pair:", 0) == 0) ok = ok && inner >= m.r_minus / 4.0 - 1e-6;
            else ok = ok && std::abs(inner - m.r_minus / 2.0) <= 1e-9;
        }
        if (!ok) ++violations;
    }
    detail = "beta0 " + fmt(rep.beta0_estimate) + ", " + std::to_string(checked) +
             " boundary points, " + std::to_string(violations) + " inequality violations";
    return checked == 10000 && violations == 0;
}

// --- 3: stationary law of the half-line with potential 2x ------------------

bool crit_stationary(std::string& detail) {
    RunConfig cfg;
    cfg.domain = "halfline";
    cfg.dim = 1;
    cfg.phi = "linear";
    cfg.phi_coeff = 2.0;
    const DynamicsSpec spec = domain_dynamics(cfg);
    const GibbsSpec target = domain_gibbs(cfg);
    auto cdf = [](double x) { return 1.0 - std::exp(-2.0 * x); };

    // 100 independent paths, sampled every 0.2 time units after a burn-in of
    // 2 time units: 1e5 well-decorrelated post-burn-in samples.
    std::vector<double> sde;
    sde.reserve(100000);
    Vec x0(1);
    x0 << 0.5;
    for (uint64_t p = 0; p < 100; ++p) {
        const PathRecord rec = simulate(spec, x0, 200.2, 1e-3, 300, p, 200);
        const size_t rows = rec.times.size();
        for (size_t k = rows - 1000; k < rows; ++k)
            sde.push_back(rec.states(static_cast<Eigen::Index>(k), 0));
    }
    const double ks_sde = ks_distance(sde, cdf);

    const McmcResult mcmc = sample_mcmc(target, 100000, -1, 0.8, 301, 5);
    std::vector<double> chain;
    chain.reserve(mcmc.samples.size());
    for (const Vec& s : mcmc.samples) chain.push_back(s(0));
    const double ks_mcmc = ks_distance(chain, cdf);
    const double ks_both = ks_two_sample(sde, chain);

    detail = "KS sde " + fmt(ks_sde) + ", mcmc " + fmt(ks_mcmc) + ", two-sample " + fmt(ks_both);
    return sde.size() == 100000 && ks_sde < 0.02 && ks_mcmc < 0.02 && ks_both < 0.03;
}

// --- 4: reversibility test plus a rotational-drift negative control --------

bool crit_reversibility(std::string& detail) {
    const double alpha = 0.01;
    const long n_paths = 10000;

    // Positive case: quadrant Langevin with phi = |x|^2, started from its
    // Gibbs measure (truncation at 3 leaves ~1e-4 of the mass behind).
    RunConfig cfg;
    cfg.domain = "quadrant";
    cfg.phi = "quadratic";
    cfg.phi_coeff = 1.0;
    const DynamicsSpec langevin = domain_dynamics(cfg);
    auto gauss_sampler = [](uint64_t i) {
        RngStream rng(401, i + 1);
        while (true) {
            Vec x(2);
            x << 3.0 * rng.u01(), 3.0 * rng.u01();
            if (std::log(rng.u01() + 1e-300) < -x.squaredNorm()) return x;
        }
    };
    auto grid_cell = [](const Vec& x) {
        const int a = std::min(3, static_cast<int>(x(0) / 0.4));
        const int b = std::min(3, static_cast<int>(x(1) / 0.4));
        return 4 * a + b;
    };
    const ReversibilityReport pos = reversibility_test(langevin, gauss_sampler, grid_cell, 16,
                                                       n_paths, 1.0, 1e-3, alpha, 402, 4);

    // Negative control: uniform measure on the annulus is stationary for a
    // pure rotational drift but not reversible.
    RunConfig acfg;
    acfg.domain = "annulus";
    ConstraintSet aset = domain_constraints(acfg);
    const Mat eye = Mat::Identity(2, 2);
    DynamicsSpec rotor{std::move(aset), [eye](const Vec&) { return eye; },
                       [](const Vec& x) {
                           Vec b(2);
                           b << -3.0 * x(1), 3.0 * x(0);
                           return b;
                       },
                       "smooth bounded coefficients"};
    auto ring_sampler = [](uint64_t i) {
        RngStream rng(403, i + 1);
        while (true) {
            Vec x(2);
            x << 4.0 * rng.u01() - 2.0, 4.0 * rng.u01() - 2.0;
            const double r = x.norm();
            if (r > 1.0 && r < 2.0) return x;
        }
    };
    auto sector_cell = [](const Vec& x) {
        const double t = std::atan2(x(1), x(0));
        return std::min(7, static_cast<int>((t + M_PI) / (2.0 * M_PI) * 8.0));
    };
    const ReversibilityReport neg = reversibility_test(rotor, ring_sampler, sector_cell, 8,
                                                       n_paths, 1.0, 1e-3, alpha, 404, 4);

    detail = "langevin swap p " + fmt(pos.swap_pvalue) + " stationarity p " +
             fmt(pos.stationarity_pvalue) + "; rotor swap p " + fmt(neg.swap_pvalue);
    return pos.conclusive && pos.reversible && pos.stationary && neg.conclusive &&
           !neg.reversible;
}

// --- 5: oblique vs transformed-normal systems on a shared Brownian path ----

struct OrderProbe {
    double e_fine = 0.0;
    double e_coarse = 0.0;
};

OrderProbe pathwise_probe(const DynamicsSpec& oblique, const Vec& x0, double T, uint64_t seed) {
    const DynamicsSpec normal = transform_dynamics(oblique);
    const Mat theta = oblique.set.obliquity();
    const Vec y0 = theta.inverse() * x0;
    const int D = oblique.set.dimension();

    auto run_both = [&](double dt, const NoiseSource& noise) {
        const PathRecord xo = simulate_with_noise(oblique, x0, T, dt, noise);
        const PathRecord xn = simulate_with_noise(normal, y0, T, dt, noise);
        double sup = 0.0;
        for (size_t k = 0; k < xo.times.size(); ++k) {
            const Vec a = xo.states.row(static_cast<Eigen::Index>(k)).transpose();
            const Vec b = theta * xn.states.row(static_cast<Eigen::Index>(k)).transpose();
            sup = std::max(sup, (a - b).lpNorm<Eigen::Infinity>());
        }
        return sup;
    };

    OrderProbe probe;
    const int reps = 8;
    for (int rep = 0; rep < reps; ++rep) {
        Philox4x32 gen(seed, static_cast<uint64_t>(rep));
        auto fine = [&gen, D](long k) {
            Vec z(D);
            gen.fill_normals(static_cast<uint64_t>(k),
                             std::span<double>(z.data(), static_cast<size_t>(D)));
            return z;
        };
        // Coarse prediction events bundle the four fine prediction events they
        // cover (same underlying Brownian path); auxiliary events (retry
        // halves, boundary bridge refinements) draw from a disjoint range.
        auto coarse = [&gen, D](long event) {
            Vec z(D);
            if (event % 32 != 0) {
                gen.fill_normals(static_cast<uint64_t>(1000000000L + event),
                                 std::span<double>(z.data(), static_cast<size_t>(D)));
                return z;
            }
            z.setZero();
            Vec tmp(D);
            const long e = event / 32;
            for (int j = 0; j < 4; ++j) {
                gen.fill_normals(static_cast<uint64_t>(32 * (4 * e + j)),
                                 std::span<double>(tmp.data(), static_cast<size_t>(D)));
                z += tmp;
            }
            return Vec(z / 2.0);
        };
        probe.e_coarse += run_both(4e-3, coarse) / reps;
        probe.e_fine += run_both(1e-3, fine) / reps;
    }
    return probe;
}

bool crit_pathwise(std::string& detail) {
    std::vector<Constraint> cs;
    cs.push_back({"wall", [](const Vec& x) { return x(0); },
                  [](const Vec&) { return Vec(Vec::Ones(1)); }, 0.0, 1.0});
    ConstraintSet line_set(std::move(cs), 1, Mat(2.0 * Mat::Identity(1, 1)));
    const Mat line_sigma = line_set.obliquity();
    DynamicsSpec line{std::move(line_set), [line_sigma](const Vec&) { return line_sigma; },
                      [](const Vec&) { return Vec(Vec::Constant(1, -0.5)); },
                      "constant coefficients"};
    Vec lx0(1);
    lx0 << 0.4;
    const OrderProbe p1 = pathwise_probe(line, lx0, 1.0, 500);

    planet::PlanetModel m = make_planet(2, 0.5);
    m.elasticity = 0.5;
    const DynamicsSpec pd = planet::build_dynamics(m);
    const OrderProbe p2 = pathwise_probe(pd, planet::reference_config(m), 1.0, 501);

    // For diagonal obliquity the discrete systems agree exactly (the oblique
    // correction is the conjugated normal correction, step by step), so the
    // sup-difference can be pure roundoff at both grids; agreement at the
    // roundoff floor counts as attained order.
    const auto ok = [](const OrderProbe& p) {
        return (p.e_fine < p.e_coarse || p.e_fine <= 1e-9) && p.e_coarse < 0.5;
    };
    detail = "1d e " + fmt(p1.e_fine) + " vs " + fmt(p1.e_coarse) + ", planet e " +
             fmt(p2.e_fine) + " vs " + fmt(p2.e_coarse);
    return ok(p1) && ok(p2);
}

// --- 6: local-time contract on planet paths --------------------------------

bool crit_local_times(std::string& detail) {
    const planet::PlanetModel m = make_planet(4, 0.5);
    const DynamicsSpec spec = planet::build_dynamics(m);
    const Vec x0 = planet::reference_config(m);
    long violations = 0, infeasible = 0, decreasing = 0;
    for (uint64_t seed : {600, 601, 602}) {
        const PathRecord rec = simulate(spec, x0, 10.0, 1e-3, seed);
        violations += rec.support_violations;
        for (Eigen::Index r = 0; r < rec.states.rows(); ++r)
            if (spec.set.min_value(rec.states.row(r).transpose()) < -spec.set.feas_tol())
                ++infeasible;
        for (Eigen::Index r = 1; r < rec.local_times.rows(); ++r)
            for (Eigen::Index c = 0; c < rec.local_times.cols(); ++c)
                if (rec.local_times(r, c) < rec.local_times(r - 1, c)) ++decreasing;
    }
    detail = "3 paths: " + std::to_string(infeasible) + " infeasible states, " +
             std::to_string(decreasing) + " local-time decreases, " + std::to_string(violations) +
             " support violations";
    return infeasible == 0 && decreasing == 0 && violations == 0;
}

// --- 7: low-temperature clustering trend -----------------------------------

bool crit_clustering(std::string& detail) {
    const planet::PlanetModel m = make_planet(4, 1.0);
    planet::CurveOptions opts;
    opts.workers = 4;
    const std::vector<double> taus = {1.0, 0.5, 0.25, 0.1, 0.05};
    const auto curve = planet::clustering_curve(m, taus, 0.2, 2000, 700, opts);

    bool monotone = true;
    std::string values;
    for (size_t k = 0; k < curve.size(); ++k) {
        if (k > 0 && curve[k].ci_low > curve[k - 1].ci_high) monotone = false;
        values += (k ? " " : "") + fmt(curve[k].estimate);
    }
    const double final_est = curve.back().estimate;
    detail = "not-packed estimates {" + values + "}, final " + fmt(final_est);
    return monotone && final_est < 0.05;
}

// --- 8: planet Gibbs sampler vs the exact rejection oracle -----------------

bool crit_mcmc_vs_rejection(std::string& detail) {
    const planet::PlanetModel m = make_planet(2, 0.5);
    const GibbsSpec spec = planet::gibbs_spec(m);
    const long n = 50000;

    const McmcResult mcmc =
        sample_mcmc(spec, n, -1, planet::gibbs_proposal_scale(m), 800, 60);
    const std::vector<Vec> exact = sample_rejection(spec, n, 801);

    // Fixed 20x20 binning of (radius of particle 0's center, surface gap of
    // the pair), clamped into the edge bins.
    auto bin_of = [&m](const Vec& x) {
        const double rad = planet::position(x, 0, m.d).norm();
        const double gap = (planet::position(x, 0, m.d) - planet::position(x, 1, m.d)).norm() -
                           planet::radius(x, 0, m.d) - planet::radius(x, 1, m.d);
        const int a = std::clamp(static_cast<int>((rad - 1.0) / 2.5 * 20.0), 0, 19);
        const int b = std::clamp(static_cast<int>(gap / 5.0 * 20.0), 0, 19);
        return 20 * a + b;
    };
    std::vector<long> ha(400, 0), hb(400, 0);
    for (const Vec& s : mcmc.samples) ++ha[static_cast<size_t>(bin_of(s))];
    for (const Vec& s : exact) ++hb[static_cast<size_t>(bin_of(s))];
    const double tv = tv_distance(ha, hb);
    detail = "TV " + fmt(tv) + " on 20x20 bins, " + std::to_string(n) + " samples each";
    return tv < 0.05;
}

// --- 9: byte-identical artifacts across repeats and worker counts ----------

bool crit_determinism(std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "reflectics_acceptance";
    fs::remove_all(base);

    auto run_to = [&base](RunConfig c, const std::string& tag, int workers) {
        c.workers = workers;
        c.out_dir = (base / tag).string();
        return run(c);
    };

    RunConfig sim = parse_config("domain = quadrant\ndt = 0.001\nT = 0.2\nseed = 900\n");
    sim.subcommand = "simulate";
    bool ok = run_to(sim, "sim1", 1) == kExitOk && run_to(sim, "sim2", 3) == kExitOk;
    ok = ok && slurp(base / "sim1/path.csv") == slurp(base / "sim2/path.csv");

    RunConfig gibbs = parse_config(
        "domain = planet\nplanet_n = 2\nplanet_temperature = 0.5\nn_samples = 300\n"
        "thin = 5\nseed = 901\n");
    gibbs.subcommand = "sample-gibbs";
    ok = ok && run_to(gibbs, "g1", 1) == kExitOk && run_to(gibbs, "g2", 4) == kExitOk;
    ok = ok && slurp(base / "g1/samples.csv") == slurp(base / "g2/samples.csv");

    RunConfig curve = parse_config(
        "planet_n = 2\nplanet_temperature = 1.0\ntemperatures = 0.5, 0.25\n"
        "n_samples = 50\nthin = 10\nseed = 902\n");
    curve.subcommand = "planet";
    curve.planet_mode = "clustering-curve";
    ok = ok && run_to(curve, "c1", 1) == kExitOk && run_to(curve, "c2", 4) == kExitOk;
    ok = ok && slurp(base / "c1/clustering_curve.csv") == slurp(base / "c2/clustering_curve.csv");

    detail = ok ? "simulate, sample-gibbs, clustering-curve artifacts identical at workers 1 vs 3/4"
                : "artifact mismatch or nonzero exit";
    fs::remove_all(base);
    return ok;
}

}  // namespace

int main() {
    criterion(1, "hull min-norm/cone duality vs oracles", crit_hull);
    criterion(2, "planet boundary certificate", crit_planet_cert);
    criterion(3, "half-line stationary law", crit_stationary);
    criterion(4, "reversibility with negative control", crit_reversibility);
    criterion(5, "oblique/normal pathwise agreement order", crit_pathwise);
    criterion(6, "local-time contract on planet paths", crit_local_times);
    criterion(7, "clustering trend across the temperature sweep", crit_clustering);
    criterion(8, "planet sampler vs rejection oracle", crit_mcmc_vs_rejection);
    criterion(9, "deterministic artifacts across workers", crit_determinism);
    if (g_failures > 0) {
        std::printf("%d of 9 criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
