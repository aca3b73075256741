#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "reflectics/constraint.hpp"
#include "reflectics/hull.hpp"
#include "reflectics/rng.hpp"

namespace reflectics {

// Largest singular value (operator norm) of a matrix.
double op_norm(const Mat& m);

// Feasible-point search: random restarts in the box, then ascent on the worst
// constraint value. Throws if nothing feasible is found.
Vec find_feasible_point(const ConstraintSet& set, const Vec& box_lo, const Vec& box_hi,
                        uint64_t seed, int max_restarts = 256);

// Draws boundary points of D = {all f > 0}: a random interior ray is bisected
// onto the first crossed face, then locally refined to co-activate nearby
// constraints (corner points are the dangerous ones, pure face sampling
// misses them). sample(i) is a pure function of (seed, i).
class BoundarySampler {
public:
    BoundarySampler(const ConstraintSet& set, Vec box_lo, Vec box_hi, uint64_t seed);

    std::optional<Vec> sample(uint64_t index) const;

    const Vec& box_lo() const { return box_lo_; }
    const Vec& box_hi() const { return box_hi_; }
    int max_tries = 24;

private:
    const ConstraintSet& set_;
    Vec box_lo_, box_hi_;
    uint64_t seed_;
    Vec interior_;
    double ray_cap_;

    std::optional<Vec> try_once(RngStream& rng) const;
    bool refine_corner(Vec& p, RngStream& rng) const;
};

enum class CompatVerdict { CertifiedAtSamples, Refuted, DegenerateInput };

std::string to_string(CompatVerdict v);

struct CompatReport {
    double beta0_estimate = 0.0;       // running min over samples of the hull min-norm distance
    double grad_floor_observed = 0.0;  // min |grad f| over active constraints at samples
    double hessian_bound_declared = 0.0;
    long samples_checked = 0;
    long samples_failed = 0;
    Vec worst_point;
    CompatVerdict verdict = CompatVerdict::DegenerateInput;
    std::string note;
    Vec box_lo, box_hi;  // the probe box the certificate is restricted to
};

struct CompatOptions {
    double act_tol = 0.0;     // 0 -> set default (1e-8 * scale)
    double refute_tol = 1e-6; // below the hull-solver noise floor
};

CompatReport check_compatibility(const ConstraintSet& set, const BoundarySampler& sampler,
                                 long n_samples, const CompatOptions& opts = {});

// Stability transform: constraints y -> f(theta * y), with conservatively
// rescaled gradient floor and hessian bound. Throws on singular theta.
ConstraintSet transform_set(const ConstraintSet& set, const Mat& theta);

// Drop one coordinate every constraint is invariant in (verified by random
// probes); returns the induced (D-1)-dimensional set.
ConstraintSet project_set(const ConstraintSet& set, int dropped_coord,
                          double probe_radius = 1.0, uint64_t probe_seed = 7);

}  // namespace reflectics
