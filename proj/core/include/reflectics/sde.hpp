#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reflectics/constraint.hpp"
#include "reflectics/rng.hpp"

namespace reflectics {

// Coefficients of the reflected SDE on the domain of `set`, reflected along
// the oblique directions (obliquity^T obliquity) grad f.
struct DynamicsSpec {
    ConstraintSet set;
    std::function<Mat(const Vec&)> sigma;  // diffusion coefficient, D x D
    std::function<Vec(const Vec&)> drift;
    std::string lipschitz_note;
};

struct PathRecord {
    std::vector<double> times;
    Mat states;       // one row per recorded grid point
    Mat local_times;  // cumulative L_f, one column per constraint (declaration order)
    std::vector<std::string> constraint_ids;
    uint64_t seed = 0;
    double dt = 0.0;
    int record_stride = 1;
    // Steps where some L_f increment was applied without the constraint ever
    // being observed at or below act_tol during the step. Zero by construction
    // of the correction scheme; recorded so the contract stays checkable.
    long support_violations = 0;
};

struct StepResult {
    Vec x_next;
    std::vector<double> dl;  // per-constraint multiplier of the oblique correction
    // Per constraint: was it observed at or below the boundary during the
    // correction? dl[i] > 0 without saw_boundary[i] is a support-condition
    // violation (cannot happen with this scheme; counted anyway).
    std::vector<char> saw_boundary;
};

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& msg, std::string worst)
        : std::runtime_error(msg), worst_constraint(std::move(worst)) {}
    std::string worst_constraint;
};

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& msg, PathRecord partial)
        : std::runtime_error(msg), partial_record(std::move(partial)) {}
    PathRecord partial_record;
};

struct StepOptions {
    // Sweep budget for the multiplier iteration. Jammed configurations
    // (particle pinned between several co-active constraints) need a few
    // hundred sweeps to settle.
    int max_sweeps = 400;
    int newton_iters = 6;
};

// One Euler-Maruyama prediction plus the multi-constraint Skorokhod
// correction (Gauss-Seidel sweeps over violated constraints, gradients
// re-evaluated at the moving iterate, deepest violation first).
StepResult step(const DynamicsSpec& spec, const Vec& x, double dt, const Vec& noise,
                const StepOptions& opts = {});

// Noise supplier abstraction: maps a noise event index to a vector of
// standard normals. Step k owns the event block [32k, 32k+32): 32k is the
// main prediction, 32k+1 and 32k+2 drive the half-step retry, and
// 32k+3 .. 32k+17 are the bridge normals used to refine a boundary-adjacent
// step into 16 substeps that share the step's total Brownian increment.
// Used for pathwise comparisons on a shared Brownian path; simulate() wires
// in the counter-based generator.
using NoiseSource = std::function<Vec(long event_index)>;

PathRecord simulate(const DynamicsSpec& spec, const Vec& x0, double T, double dt,
                    uint64_t seed, uint64_t path_index = 0, int record_stride = 1,
                    const StepOptions& opts = {});

PathRecord simulate_with_noise(const DynamicsSpec& spec, const Vec& x0, double T, double dt,
                               const NoiseSource& noise, int record_stride = 1,
                               const StepOptions& opts = {});

// Normal-reflection system on the transformed constraints f(theta .);
// theta * (its solution) solves the original pathwise for the same noise.
DynamicsSpec transform_dynamics(const DynamicsSpec& spec);

// --- Reversibility test -----------------------------------------------------

struct ReversibilityReport {
    double swap_statistic = 0.0;
    int swap_df = 0;
    double swap_pvalue = 1.0;
    double stationarity_statistic = 0.0;
    int stationarity_df = 0;
    double stationarity_pvalue = 1.0;
    long paths_used = 0;
    bool conclusive = false;
    bool reversible = false;  // swap symmetry holds at level alpha
    bool stationary = false;
};

// Two-sample symmetry test for the joint law of (X(0), X(T)) against the
// swapped pairs, plus a marginal stationarity check, on user-supplied
// state-space cells.
ReversibilityReport reversibility_test(const DynamicsSpec& spec,
                                       const std::function<Vec(uint64_t)>& initial_sampler,
                                       const std::function<int(const Vec&)>& cell_of,
                                       int n_cells, long n_paths, double T, double dt,
                                       double alpha, uint64_t seed, int workers = 1);

}  // namespace reflectics
