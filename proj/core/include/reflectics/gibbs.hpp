#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "reflectics/constraint.hpp"
#include "reflectics/rng.hpp"

namespace reflectics {

// Target measure 1_D(x) e^{-phi(x)} dx on the domain of `set`.
struct GibbsSpec {
    ConstraintSet set;
    std::function<double(const Vec&)> phi;
    Vec envelope_lo, envelope_hi;  // bounding box for rejection sampling
    // max of -phi over the feasible envelope, when known; NaN -> probed.
    double log_density_cap = std::numeric_limits<double>::quiet_NaN();
    // Optional additional *symmetric* proposal (e.g. rigid rotations for
    // isotropic targets), mixed into the random walk with this probability.
    std::function<Vec(const Vec&, class RngStream&)> extra_move;
    double extra_move_prob = 0.0;
    // Optional chain start (empty -> random feasible point). Starting inside
    // the high-density region matters at low temperature, where the random
    // walk cannot cross the low-density moat in any reasonable burn-in.
    Vec start;
};

// -phi(x) on the feasible set (all f > 0), -inf outside.
double log_density(const GibbsSpec& spec, const Vec& x);

struct McmcResult {
    std::vector<Vec> samples;
    double acceptance_rate = 0.0;
    long burn_in_used = 0;
};

// Random-walk Metropolis targeting the Gibbs measure. Infeasible proposals
// are rejected outright. proposal_scale is per coordinate. burn_in < 0
// selects 10x the integrated autocorrelation time of a pilot run.
McmcResult sample_mcmc(const GibbsSpec& spec, long n, long burn_in, const Vec& proposal_scale,
                       uint64_t seed, long thin = 1);
McmcResult sample_mcmc(const GibbsSpec& spec, long n, long burn_in, double proposal_scale,
                       uint64_t seed, long thin = 1);

// Exact i.i.d. rejection sampler on the envelope box; the desk-scale oracle.
// Throws if the envelope density cap is violated or the acceptance rate
// collapses.
std::vector<Vec> sample_rejection(const GibbsSpec& spec, long n, uint64_t seed);

// --- Finiteness of the planet-type measure ---------------------------------

struct GravityTriple {
    std::function<double(double)> value;   // G
    std::function<double(double)> deriv;   // G'
    std::function<double(double)> deriv2;  // G''
};

enum class IntegrabilityVerdict { Finite, Unknown };

// Tail criterion: finite when (l_probe - eta) / tau^2 > d, where l_probe
// estimates liminf rho G'(rho) over a log-spaced probe tail. Never claims
// divergence.
IntegrabilityVerdict check_integrability(const GravityTriple& gravity, int d, double tau,
                                         double eta = 0.1, double probe_lo = 1e2,
                                         double probe_hi = 1e6);

}  // namespace reflectics
