#include "reflectics/compat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reflectics {

double op_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

namespace {

Vec random_in_box(const Vec& lo, const Vec& hi, RngStream& rng) {
    Vec x(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) x(k) = lo(k) + (hi(k) - lo(k)) * rng.u01();
    return x;
}

Vec random_unit(int dim, RngStream& rng) {
    Vec u(dim);
    for (int k = 0; k < dim; ++k) u(k) = rng.normal();
    const double n = u.norm();
    return n > 0 ? Vec(u / n) : Vec(Vec::Unit(dim, 0));
}

}  // namespace

Vec find_feasible_point(const ConstraintSet& set, const Vec& box_lo, const Vec& box_hi,
                        uint64_t seed, int max_restarts) {
    require(box_lo.size() == set.dimension() && box_hi.size() == set.dimension(),
            "find_feasible_point: box dimension mismatch");
    RngStream rng(seed, 0x6665617369626c65ULL);
    const double margin = 10.0 * set.act_tol();
    for (int restart = 0; restart < max_restarts; ++restart) {
        Vec x = random_in_box(box_lo, box_hi, rng);
        // Ascent on the worst constraint value.
        for (int it = 0; it < 400; ++it) {
            double worst = std::numeric_limits<double>::infinity();
            int wi = -1;
            for (int i = 0; i < set.size(); ++i) {
                const double v = set.at(i).value(x);
                if (v < worst) {
                    worst = v;
                    wi = i;
                }
            }
            if (worst > margin) return x;
            Vec g = set.at(wi).gradient(x);
            const double gn = g.norm();
            if (gn < 1e-14) break;
            double step = std::max(margin - worst, 1e-3 * set.scale()) / gn;
            x += step * (g / gn);
            if (!all_finite(x)) break;
        }
    }
    throw std::runtime_error("find_feasible_point: no feasible point found in box");
}

BoundarySampler::BoundarySampler(const ConstraintSet& set, Vec box_lo, Vec box_hi, uint64_t seed)
    : set_(set), box_lo_(std::move(box_lo)), box_hi_(std::move(box_hi)), seed_(seed) {
    interior_ = find_feasible_point(set, box_lo_, box_hi_, seed ^ 0x1234ULL);
    ray_cap_ = 2.0 * (box_hi_ - box_lo_).norm();
}

std::optional<Vec> BoundarySampler::sample(uint64_t index) const {
    RngStream rng(seed_, index + 1);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        if (auto p = try_once(rng)) return p;
    }
    return std::nullopt;
}

std::optional<Vec> BoundarySampler::try_once(RngStream& rng) const {
    const double act = set_.act_tol();

    // Diversify the ray origin with a short feasible random walk.
    Vec origin = interior_;
    const double walk = 0.2 * (box_hi_ - box_lo_).norm();
    for (int s = 0; s < 4; ++s) {
        Vec cand = origin + walk * rng.u01() * random_unit(set_.dimension(), rng);
        if (set_.min_value(cand) > 10.0 * act) origin = cand;
    }

    const Vec dir = random_unit(set_.dimension(), rng);

    // March out until the ray leaves D.
    double t_in = 0.0, t_out = -1.0;
    for (double t = 1e-3 * ray_cap_; t <= ray_cap_; t *= 1.7) {
        if (set_.min_value(origin + t * dir) < 0.0) {
            t_out = t;
            break;
        }
        t_in = t;
    }
    if (t_out < 0.0) return std::nullopt;  // unbounded in this direction

    for (int it = 0; it < 200 && (t_out - t_in) * 1.0 > 0.0; ++it) {
        const double mid = 0.5 * (t_in + t_out);
        if (set_.min_value(origin + mid * dir) >= 0.0)
            t_in = mid;
        else
            t_out = mid;
        if (set_.min_value(origin + t_in * dir) <= 0.5 * act) break;
    }
    Vec p = origin + t_in * dir;
    if (set_.min_value(p) > act || set_.min_value(p) < -act) return std::nullopt;

    // Half the samples stay on the first face; the rest hunt for corners.
    if (rng.u01() < 0.5) refine_corner(p, rng);

    if (set_.min_value(p) < -act) return std::nullopt;
    if (set_.active_indices(p, act).empty()) return std::nullopt;
    return p;
}

bool BoundarySampler::refine_corner(Vec& p, RngStream& rng) const {
    const double act = set_.act_tol();
    const double window = 0.25 * (box_hi_ - box_lo_).norm();
    Vec best = p;

    for (int step = 0; step < 30; ++step) {
        auto active = set_.active_indices(best, act);
        if (active.empty()) break;

        // Nearest inactive constraint within the hunting window.
        int target = -1;
        double target_val = window;
        for (int i = 0; i < set_.size(); ++i) {
            if (std::find(active.begin(), active.end(), i) != active.end()) continue;
            const double v = set_.at(i).value(best);
            if (v > act && v < target_val) {
                target_val = v;
                target = i;
            }
        }
        if (target < 0) break;

        // Slide along the tangent of the active faces toward the target face.
        Vec d = -set_.at(target).gradient(best);
        for (int a : active) {
            Vec ga = set_.at(a).gradient(best);
            const double gn = ga.squaredNorm();
            if (gn > 1e-20) d -= (d.dot(ga) / gn) * ga;
        }
        const double dn = d.norm();
        if (dn < 1e-14) break;
        d /= dn;

        // Newton step along the slide direction: the directional derivative,
        // not the full gradient norm, sets the distance to the target face.
        const double slope = -d.dot(set_.at(target).gradient(best));
        if (slope < 1e-14) break;
        bool moved = false;
        for (double s = std::min(target_val / slope, window); s > 1e-12; s *= 0.5) {
            Vec cand = best + s * d;
            // Pull the drifted active faces back onto the boundary.
            for (int sweep = 0; sweep < 12; ++sweep) {
                bool ok = true;
                for (int a : active) {
                    const double v = set_.at(a).value(cand);
                    if (v < -0.25 * act || v > 0.75 * act) {
                        Vec g = set_.at(a).gradient(cand);
                        const double gn2 = g.squaredNorm();
                        if (gn2 < 1e-20) { ok = false; break; }
                        cand += ((0.25 * act - v) / gn2) * g;
                        ok = false;
                    }
                }
                if (ok) break;
            }
            if (set_.min_value(cand) >= -act && set_.at(target).value(cand) < set_.at(target).value(best)) {
                best = cand;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (set_.at(target).value(best) <= act) continue;  // corner reached, look for the next face
    }

    if (set_.min_value(best) >= -act && !set_.active_indices(best, act).empty()) {
        p = best;
        return true;
    }
    (void)rng;
    return false;
}

std::string to_string(CompatVerdict v) {
    switch (v) {
        case CompatVerdict::CertifiedAtSamples: return "certified-at-samples";
        case CompatVerdict::Refuted: return "refuted";
        case CompatVerdict::DegenerateInput: return "degenerate-input";
    }
    return "?";
}

CompatReport check_compatibility(const ConstraintSet& set, const BoundarySampler& sampler,
                                 long n_samples, const CompatOptions& opts) {
    CompatReport rep;
    rep.box_lo = sampler.box_lo();
    rep.box_hi = sampler.box_hi();
    for (const auto& c : set.constraints())
        rep.hessian_bound_declared = std::max(rep.hessian_bound_declared, c.hessian_bound);
    rep.grad_floor_observed = std::numeric_limits<double>::infinity();
    rep.beta0_estimate = std::numeric_limits<double>::infinity();

    const double act = opts.act_tol > 0.0 ? opts.act_tol : set.act_tol();
    long worst_index = -1;

    for (long i = 0; i < n_samples; ++i) {
        auto maybe = sampler.sample(static_cast<uint64_t>(i));
        if (!maybe) {
            ++rep.samples_failed;
            continue;
        }
        const Vec& p = *maybe;
        auto active = set.active_indices(p, act);
        std::vector<Vec> normals;
        normals.reserve(active.size());
        for (int a : active) {
            Vec g = set.at(a).gradient(p);
            const double gn = g.norm();
            if (gn < 0.5 * set.at(a).grad_floor) {
                rep.verdict = CompatVerdict::DegenerateInput;
                rep.note = "constraint '" + set.at(a).id + "' has degenerate gradient at an active point";
                rep.worst_point = p;
                return rep;
            }
            rep.grad_floor_observed = std::min(rep.grad_floor_observed, gn);
            normals.push_back(g / gn);
        }
        const double dist = min_norm_in_hull(normals).distance;
        ++rep.samples_checked;
        if (dist < rep.beta0_estimate || (dist == rep.beta0_estimate && i < worst_index)) {
            rep.beta0_estimate = dist;
            rep.worst_point = p;
            worst_index = i;
        }
    }

    if (rep.samples_checked == 0 || rep.samples_checked < n_samples / 2) {
        rep.verdict = CompatVerdict::DegenerateInput;
        rep.note = "sampler could not reach the boundary often enough";
        return rep;
    }
    rep.verdict = rep.beta0_estimate <= opts.refute_tol ? CompatVerdict::Refuted
                                                        : CompatVerdict::CertifiedAtSamples;
    return rep;
}

ConstraintSet transform_set(const ConstraintSet& set, const Mat& theta) {
    require(theta.rows() == set.dimension() && theta.cols() == set.dimension(),
            "transform_set: theta must be DxD");
    const double det = theta.determinant();
    require(std::isfinite(det) && std::abs(det) > 1e-300, "transform_set: theta is singular");
    Mat theta_inv = theta.inverse();
    require(theta_inv.allFinite(), "transform_set: theta is numerically singular");
    const double nt = op_norm(theta);
    const double nti = op_norm(theta_inv);

    std::vector<Constraint> out;
    out.reserve(set.constraints().size());
    for (const auto& c : set.constraints()) {
        Constraint g;
        g.id = c.id;
        g.value = [theta, f = c.value](const Vec& y) { return f(theta * y); };
        g.gradient = [theta, grad = c.gradient](const Vec& y) { return Vec(theta.transpose() * grad(theta * y)); };
        g.hessian_bound = c.hessian_bound * nt * nt;
        g.grad_floor = c.grad_floor / nti;
        out.push_back(std::move(g));
    }
    ConstraintSet result(std::move(out), set.dimension(), Mat(Mat::Identity(set.dimension(), set.dimension())));
    result.set_scale(set.scale());
    return result;
}

ConstraintSet project_set(const ConstraintSet& set, int dropped_coord,
                          double probe_radius, uint64_t probe_seed) {
    const int d = set.dimension();
    require(dropped_coord >= 0 && dropped_coord < d, "project_set: coordinate index out of range");
    require(d >= 2, "project_set: need dimension >= 2");

    // Invariance probes.
    RngStream rng(probe_seed, 0x70726f6a656374ULL);
    for (const auto& c : set.constraints()) {
        for (int probe = 0; probe < 32; ++probe) {
            Vec x(d);
            for (int k = 0; k < d; ++k) x(k) = probe_radius * (2.0 * rng.u01() - 1.0);
            Vec x0 = x;
            x0(dropped_coord) = 0.0;
            if (std::abs(c.value(x) - c.value(x0)) > 1e-9)
                throw std::invalid_argument("project_set: constraint '" + c.id +
                                            "' depends on the dropped coordinate");
        }
    }

    auto embed = [d, dropped_coord](const Vec& y) {
        Vec x(d);
        int j = 0;
        for (int k = 0; k < d; ++k) x(k) = (k == dropped_coord) ? 0.0 : y(j++);
        return x;
    };
    auto squeeze = [d, dropped_coord](const Vec& g) {
        Vec out(d - 1);
        int j = 0;
        for (int k = 0; k < d; ++k)
            if (k != dropped_coord) out(j++) = g(k);
        return out;
    };

    std::vector<Constraint> out;
    out.reserve(set.constraints().size());
    for (const auto& c : set.constraints()) {
        Constraint g;
        g.id = c.id;
        g.value = [embed, f = c.value](const Vec& y) { return f(embed(y)); };
        g.gradient = [embed, squeeze, grad = c.gradient](const Vec& y) { return squeeze(grad(embed(y))); };
        g.hessian_bound = c.hessian_bound;
        g.grad_floor = c.grad_floor;
        out.push_back(std::move(g));
    }
    ConstraintSet result(std::move(out), d - 1);
    result.set_scale(set.scale());
    return result;
}

}  // namespace reflectics
