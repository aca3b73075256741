#include "reflectics/sde.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "reflectics/compat.hpp"
#include "reflectics/stats.hpp"

namespace reflectics {

namespace {

struct CorrectionOutcome {
    Vec x;
    std::vector<double> dl;
    std::vector<char> saw_boundary;
    bool converged = true;
    std::string worst_id;
};

CorrectionOutcome correct(const DynamicsSpec& spec, Vec y, const StepOptions& opts) {
    const ConstraintSet& set = spec.set;
    const Mat& refl = set.reflection_matrix();
    const double feas = set.feas_tol();
    const int m = set.size();

    CorrectionOutcome out;
    out.dl.assign(static_cast<size_t>(m), 0.0);
    out.saw_boundary.assign(static_cast<size_t>(m), 0);

    // Projected Gauss-Seidel on the multipliers: each visit drives the
    // constraint value to zero by adjusting its own multiplier, clamped at
    // zero. Pushes from later constraints can thus be partially recalled,
    // which makes the converged correction the minimal one (it satisfies
    // feasibility, lambda >= 0, and complementarity lambda * f = 0).
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        // Constraints needing work: violated, or over-satisfied while still
        // holding a positive multiplier. Deepest violation first, declaration
        // order as the tie-break.
        std::vector<std::pair<double, int>> active;
        for (int i : set.violation_candidates(y)) {
            const double v = set.at(i).value(y);
            if (v < -feas || (out.dl[static_cast<size_t>(i)] > 0.0 && v > feas))
                active.push_back({v, i});
        }
        if (active.empty()) {
            out.x = std::move(y);
            return out;
        }
        std::stable_sort(active.begin(), active.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        for (const auto& [depth, i] : active) {
            (void)depth;
            const Constraint& c = set.at(i);
            double& lambda = out.dl[static_cast<size_t>(i)];
            for (int it = 0; it < opts.newton_iters; ++it) {
                const double v = c.value(y);
                if (lambda <= 0.0 && v >= 0.0) break;
                if (v < 0.0) out.saw_boundary[static_cast<size_t>(i)] = 1;
                Vec g = c.gradient(y);
                Vec dir = refl * g;
                const double slope = g.dot(dir);
                if (slope <= 1e-300) break;
                const double next = std::max(0.0, lambda - v / slope);
                if (next == lambda) break;
                y += (next - lambda) * dir;
                lambda = next;
            }
        }
    }

    // Sweep budget exhausted. Feasible but with an unsettled multiplier is
    // acceptable (the correction is merely slightly non-minimal); infeasible
    // is a step failure.
    double worst = 0.0;
    int wi = 0;
    for (int i = 0; i < m; ++i) {
        const double v = set.at(i).value(y);
        if (v < worst) {
            worst = v;
            wi = i;
        }
    }
    if (worst < -feas) {
        out.converged = false;
        out.worst_id = set.at(wi).id;
    }
    out.x = std::move(y);
    return out;
}

}  // namespace

StepResult step(const DynamicsSpec& spec, const Vec& x, double dt, const Vec& noise,
                const StepOptions& opts) {
    const ConstraintSet& set = spec.set;
    require(dt > 0.0, "step: dt must be positive");
    require(x.size() == set.dimension() && noise.size() == set.dimension(),
            "step: dimension mismatch");
    for (int i : set.violation_candidates(x))
        require(set.at(i).value(x) >= -set.feas_tol(), "step: starting point is infeasible");

    Vec y = x + spec.sigma(x) * (std::sqrt(dt) * noise) + spec.drift(x) * dt;
    require(all_finite(y), "step: non-finite prediction");

    CorrectionOutcome out = correct(spec, std::move(y), opts);
    if (!out.converged)
        throw StepFailure("step: Skorokhod correction did not converge (worst constraint '" +
                              out.worst_id + "')",
                          out.worst_id);
    return {std::move(out.x), std::move(out.dl), std::move(out.saw_boundary)};
}

namespace {

PathRecord run_path(const DynamicsSpec& spec, const Vec& x0, double T, double dt,
                    const NoiseSource& noise, bool allow_retry, uint64_t seed,
                    int record_stride, const StepOptions& opts) {
    const ConstraintSet& set = spec.set;
    require(dt > 0.0 && T > 0.0 && dt < T, "simulate: need 0 < dt < T");
    require(set.feasible(x0, 0.0), "simulate: x0 must be strictly feasible");
    require(record_stride >= 1, "simulate: record_stride must be >= 1");

    const long n_steps = static_cast<long>(std::ceil(T / dt));
    const int m = set.size();
    const long n_rec = n_steps / record_stride + 1;

    PathRecord rec;
    rec.seed = seed;
    rec.dt = dt;
    rec.record_stride = record_stride;
    for (const auto& c : set.constraints()) rec.constraint_ids.push_back(c.id);
    rec.times.reserve(static_cast<size_t>(n_rec));
    rec.states.resize(n_rec, set.dimension());
    rec.local_times.resize(n_rec, m);

    Vec x = x0;
    Vec cum = Vec::Zero(m);
    long row = 0;
    rec.times.push_back(0.0);
    rec.states.row(row) = x.transpose();
    rec.local_times.row(row) = cum.transpose();
    ++row;

    auto record_partial = [&](long upto_row) {
        PathRecord partial = rec;
        partial.times.resize(static_cast<size_t>(upto_row));
        partial.states.conservativeResize(upto_row, Eigen::NoChange);
        partial.local_times.conservativeResize(upto_row, Eigen::NoChange);
        return partial;
    };

    // Sub-grid refinement near the boundary: the plain projection step has a
    // half-order boundary bias (probability mass piles up on the constraint
    // surface). A boundary-adjacent step is therefore re-run as 16 substeps
    // whose Brownian increments are a bridge refinement of the step's own
    // increment — the coarse displacement is preserved exactly, only the
    // reflection is resolved on a 16x finer grid.
    constexpr int kSubsteps = 16;
    const double sub_dt = dt / kSubsteps;
    const double sqrt_dt = std::sqrt(dt);

    // Per-constraint reach: the one-step displacement projected on the
    // constraint normal is N(b.grad f dt, |sigma^t grad f|^2 dt), so a 4-sigma
    // band bounds the step's excursion toward the surface. Both terms are
    // invariant under conjugating the dynamics by the obliquity, so the
    // refinement decision is representation-independent.
    auto near_boundary = [&](const Vec& at) {
        const Mat sig = spec.sigma(at);
        const Vec b = spec.drift(at);
        for (int i : set.violation_candidates(at)) {
            const Constraint& c = set.at(i);
            const Vec g = c.gradient(at);
            const double reach = 4.0 * sqrt_dt * (sig.transpose() * g).norm() + dt * std::abs(b.dot(g));
            if (c.value(at) < reach) return true;
        }
        return false;
    };

    // Dyadic bridge: split the step's total increment sqrt(dt) * xi into
    // kSubsteps conditionally exact sub-increments, consuming 15 normals.
    auto bridge_noises = [&](long k, const Vec& xi) {
        std::vector<Vec> incr = {sqrt_dt * xi};
        double len = dt;
        long event = 32 * k + 3;
        while (static_cast<int>(incr.size()) < kSubsteps) {
            std::vector<Vec> next;
            next.reserve(incr.size() * 2);
            for (const Vec& w : incr) {
                const Vec left = 0.5 * w + 0.5 * std::sqrt(len) * noise(event++);
                next.push_back(left);
                next.push_back(w - left);
            }
            incr = std::move(next);
            len *= 0.5;
        }
        for (Vec& w : incr) w /= std::sqrt(sub_dt);  // back to unit normals
        return incr;
    };

    for (long k = 0; k < n_steps; ++k) {
        auto apply = [&](StepResult& r) {
            for (int i = 0; i < m; ++i) {
                const double dl = r.dl[static_cast<size_t>(i)];
                cum(i) += dl;
                if (dl > 0.0 && !r.saw_boundary[static_cast<size_t>(i)]) ++rec.support_violations;
            }
        };
        try {
            if (near_boundary(x)) {
                const std::vector<Vec> sub = bridge_noises(k, noise(32 * k));
                Vec cur = x;
                const Vec cum_before = cum;
                const long viol_before = rec.support_violations;
                try {
                    for (const Vec& z : sub) {
                        StepResult r = step(spec, cur, sub_dt, z, opts);
                        apply(r);
                        cur = std::move(r.x_next);
                    }
                } catch (const StepFailure&) {
                    cum = cum_before;  // discard the partial substep sequence
                    rec.support_violations = viol_before;
                    throw;
                }
                x = std::move(cur);
            } else {
                StepResult r = step(spec, x, dt, noise(32 * k), opts);
                apply(r);
                x = std::move(r.x_next);
            }
        } catch (const StepFailure&) {
            if (!allow_retry) throw SimulationError("simulate: step failure", record_partial(row));
            // One retry at dt/2 with fresh sub-step noise.
            try {
                StepResult r1 = step(spec, x, dt / 2, noise(32 * k + 1), opts);
                apply(r1);
                StepResult r2 = step(spec, r1.x_next, dt / 2, noise(32 * k + 2), opts);
                apply(r2);
                x = std::move(r2.x_next);
            } catch (const StepFailure& f2) {
                throw SimulationError(std::string("simulate: step failure after dt/2 retry (") +
                                          f2.worst_constraint + ")",
                                      record_partial(row));
            }
        }
        if ((k + 1) % record_stride == 0) {
            rec.times.push_back(static_cast<double>(k + 1) * dt);
            rec.states.row(row) = x.transpose();
            rec.local_times.row(row) = cum.transpose();
            ++row;
        }
    }
    rec.times.resize(static_cast<size_t>(row));
    rec.states.conservativeResize(row, Eigen::NoChange);
    rec.local_times.conservativeResize(row, Eigen::NoChange);
    return rec;
}

}  // namespace

PathRecord simulate(const DynamicsSpec& spec, const Vec& x0, double T, double dt,
                    uint64_t seed, uint64_t path_index, int record_stride,
                    const StepOptions& opts) {
    Philox4x32 gen(seed, path_index);
    const int d = spec.set.dimension();
    NoiseSource noise = [gen, d](long event) {
        Vec z(d);
        gen.fill_normals(static_cast<uint64_t>(event), std::span<double>(z.data(), static_cast<size_t>(d)));
        return z;
    };
    return run_path(spec, x0, T, dt, noise, /*allow_retry=*/true, seed, record_stride, opts);
}

PathRecord simulate_with_noise(const DynamicsSpec& spec, const Vec& x0, double T, double dt,
                               const NoiseSource& noise, int record_stride,
                               const StepOptions& opts) {
    return run_path(spec, x0, T, dt, noise, /*allow_retry=*/false, 0, record_stride, opts);
}

DynamicsSpec transform_dynamics(const DynamicsSpec& spec) {
    const Mat theta = spec.set.obliquity();
    Mat theta_inv = theta.inverse();
    require(theta_inv.allFinite(), "transform_dynamics: obliquity is numerically singular");

    DynamicsSpec out{transform_set(spec.set, theta),
                     [theta, theta_inv, s = spec.sigma](const Vec& y) { return Mat(theta_inv * s(theta * y)); },
                     [theta, theta_inv, b = spec.drift](const Vec& y) { return Vec(theta_inv * b(theta * y)); },
                     spec.lipschitz_note};
    return out;
}

ReversibilityReport reversibility_test(const DynamicsSpec& spec,
                                       const std::function<Vec(uint64_t)>& initial_sampler,
                                       const std::function<int(const Vec&)>& cell_of,
                                       int n_cells, long n_paths, double T, double dt,
                                       double alpha, uint64_t seed, int workers) {
    require(n_cells >= 2, "reversibility_test: need at least two cells");
    require(n_paths >= 2, "reversibility_test: need at least two paths");
    workers = std::max(1, workers);

    std::vector<std::vector<long>> hist(static_cast<size_t>(workers),
                                        std::vector<long>(static_cast<size_t>(n_cells) * n_cells, 0));
    std::vector<long> used(static_cast<size_t>(workers), 0);

    auto work = [&](int w) {
        for (long p = w; p < n_paths; p += workers) {
            Vec x0 = initial_sampler(static_cast<uint64_t>(p));
            PathRecord path;
            try {
                path = simulate(spec, x0, T, dt, seed, static_cast<uint64_t>(p),
                                std::max<long>(1, static_cast<long>(std::ceil(T / dt))));
            } catch (const SimulationError&) {
                continue;
            }
            const Vec xT = path.states.row(path.states.rows() - 1).transpose();
            const int a = cell_of(x0), b = cell_of(xT);
            if (a < 0 || a >= n_cells || b < 0 || b >= n_cells) continue;
            ++hist[static_cast<size_t>(w)][static_cast<size_t>(a) * n_cells + b];
            ++used[static_cast<size_t>(w)];
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }

    std::vector<long> H(static_cast<size_t>(n_cells) * n_cells, 0);
    ReversibilityReport rep;
    for (int w = 0; w < workers; ++w) {
        rep.paths_used += used[static_cast<size_t>(w)];
        for (size_t i = 0; i < H.size(); ++i) H[i] += hist[static_cast<size_t>(w)][i];
    }
    if (rep.paths_used < std::max<long>(100, n_paths / 2)) return rep;  // inconclusive

    // Bowker symmetry test on the pair histogram.
    for (int i = 0; i < n_cells; ++i) {
        for (int j = i + 1; j < n_cells; ++j) {
            const long a = H[static_cast<size_t>(i) * n_cells + j];
            const long b = H[static_cast<size_t>(j) * n_cells + i];
            if (a + b == 0) continue;
            const double d = static_cast<double>(a - b);
            rep.swap_statistic += d * d / static_cast<double>(a + b);
            ++rep.swap_df;
        }
    }
    // Marginal at time T against the initial marginal.
    std::vector<long> c0(static_cast<size_t>(n_cells), 0), cT(static_cast<size_t>(n_cells), 0);
    for (int i = 0; i < n_cells; ++i) {
        for (int j = 0; j < n_cells; ++j) {
            c0[static_cast<size_t>(i)] += H[static_cast<size_t>(i) * n_cells + j];
            cT[static_cast<size_t>(j)] += H[static_cast<size_t>(i) * n_cells + j];
        }
    }
    for (int i = 0; i < n_cells; ++i) {
        const long a = c0[static_cast<size_t>(i)], b = cT[static_cast<size_t>(i)];
        if (a + b == 0) continue;
        const double d = static_cast<double>(a - b);
        rep.stationarity_statistic += d * d / static_cast<double>(a + b);
        ++rep.stationarity_df;
    }
    rep.stationarity_df = std::max(0, rep.stationarity_df - 1);
    if (rep.swap_df == 0 || rep.stationarity_df == 0) return rep;

    rep.swap_pvalue = chi2_sf(rep.swap_statistic, rep.swap_df);
    rep.stationarity_pvalue = chi2_sf(rep.stationarity_statistic, rep.stationarity_df);
    rep.conclusive = true;
    rep.reversible = rep.swap_pvalue > alpha;
    rep.stationary = rep.stationarity_pvalue > alpha;
    return rep;
}

}  // namespace reflectics
