#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "reflectics/constraint.hpp"
#include "reflectics/gibbs.hpp"
#include "reflectics/sde.hpp"

namespace reflectics {
namespace planet {

// n spherical particles with fluctuating radii around a fixed planet B(0,R),
// attracted by an isotropic gravity field. The state vector has block order
// (x_1, r_1, ..., x_n, r_n), dimension n(d+1).
struct PlanetModel {
    int n = 1;
    int d = 2;
    double R = 1.0;
    double r_minus = 0.1;
    double r_plus = 0.2;
    double elasticity = 1.0;   // radius noise scale relative to position noise
    double temperature = 1.0;  // tau
    GravityTriple gravity;

    int dim() const { return n * (d + 1); }
    // Probes G' > 0 and G'' <= 0 on a range, and rho G'(rho) on the tail;
    // throws on violation.
    void validate(double probe_lo = 0.5, double probe_hi = 1e4) const;
};

// Gravity family G(rho) = c ln(rho); the default shipped field.
GravityTriple log_gravity(double c);

// View helpers over the block layout.
inline Eigen::VectorBlock<const Vec> position(const Vec& x, int i, int d) {
    return x.segment(i * (d + 1), d);
}
inline double radius(const Vec& x, int i, int d) { return x(i * (d + 1) + d); }
inline Eigen::VectorBlock<Vec> position(Vec& x, int i, int d) { return x.segment(i * (d + 1), d); }
inline double& radius(Vec& x, int i, int d) { return x(i * (d + 1) + d); }

struct ContactGraph {
    std::vector<std::pair<int, int>> edges;  // pair contacts, i < j
    std::vector<int> planet_contacts;        // C^R
    std::vector<int> cluster_of;             // representative per particle
    std::vector<std::vector<int>> clusters;
};

// Constraint ids: "planet:i", "rmax:i", "rmin:i", "pair:i:j" (i < j).
// The set carries the diagonal obliquity diag(tau,...,tau,tau*elasticity)
// per particle, and a neighbor-grid candidate filter above n = 64.
ConstraintSet build_constraints(const PlanetModel& model);

// Reflected dynamics: constant diffusion = the diagonal obliquity, gravity
// drift -G'(|x_i|) x_i/|x_i| on positions, zero drift on radii.
DynamicsSpec build_dynamics(const PlanetModel& model);

// Physical local times from a path produced by build_dynamics:
// keys "LR:i", "L+:i", "L-:i", "L:i:j"; each series is cumulative and
// nondecreasing.
std::map<std::string, std::vector<double>> rescale_local_times(const PathRecord& path,
                                                               const PlanetModel& model);

ContactGraph contact_graph(const Vec& x, const PlanetModel& model, double act_tol);

// The separating-direction certificate at a boundary configuration, with
// the normalized inner products against every active constraint gradient
// and the polynomial bound on |v|^2.
struct ConeCertificate {
    Vec v;
    std::map<std::string, double> inner;  // active id -> v . grad f / |grad f|
    double v_sq = 0.0;
    double v_sq_bound = 0.0;
};
ConeCertificate cone_vector(const Vec& x, const PlanetModel& model, double act_tol);

// Upper estimate of the smallest |y_k| reachable by moving particle k alone
// (radius fixed), by multi-start descent toward the origin with feasibility
// projection. Always <= |x_k|.
double min_radial_norm(const Vec& x, const PlanetModel& model, int k, int multistarts = 0,
                       uint64_t seed = 20);

// Membership estimate for the not-packed event: some particle can move more
// than eps closer to the origin. One-sided (may under-report, never
// over-reports).
bool in_A_eps(const Vec& x, const PlanetModel& model, double eps, uint64_t seed = 20);

// Gibbs target at temperature tau: phi = sum G(|x_i|)/tau^2 on the hard-core
// domain, with planet-adapted proposal scales and a rotation move.
GibbsSpec gibbs_spec(const PlanetModel& model);
Vec gibbs_proposal_scale(const PlanetModel& model);

// A strictly feasible configuration with particles spread around the planet.
Vec reference_config(const PlanetModel& model);

// A strictly feasible configuration with the particles resting on the planet
// in an angular chain (extra shells when one shell cannot hold them all).
// Used as the Gibbs chain start: it sits inside the low-temperature mode.
Vec packed_config(const PlanetModel& model);

struct CurvePoint {
    double tau;
    double estimate;
    double ci_low;
    double ci_high;
    long n_samples;
};

struct CurveOptions {
    double eta = 0.1;
    bool override_integrability = false;
    long thin = 100;
    int workers = 1;
};

// Equilibrium estimate of the not-packed probability across a temperature
// sweep. Refuses temperatures whose integrability check is unknown unless
// overridden.
std::vector<CurvePoint> clustering_curve(const PlanetModel& model_template,
                                         const std::vector<double>& temperatures, double eps,
                                         long n_samples, uint64_t seed,
                                         const CurveOptions& opts = {});

}  // namespace planet
}  // namespace reflectics
