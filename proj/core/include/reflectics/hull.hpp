#pragma once

#include <map>
#include <string>
#include <vector>

#include "reflectics/types.hpp"

namespace reflectics {

inline constexpr double kHullOptTol = 1e-10;

// Minimum-norm point of the convex hull of a family of unit vectors,
// with the convex coefficients realizing it.
struct HullResult {
    Vec min_norm_point;
    double distance = 0.0;
    std::vector<double> coefficients;  // aligned with the input order, >= 0, sums to 1
};

// Active-simplex (Wolfe-style) min-norm point iteration with a KKT stopping
// rule: on exit z.u >= |z|^2 - opt_tol for every input u.
// Inputs must be unit vectors within 1e-9; throws otherwise.
HullResult min_norm_in_hull(const std::vector<Vec>& vectors, double opt_tol = kHullOptTol);

// Dual form: the cone axis z/|z| together with beta = min_u axis.u.
// When the origin lies in the hull (|z| ~ 0) the result is degenerate:
// beta = 0 and the axis is flagged.
struct ConeResult {
    Vec axis;
    double beta = 0.0;
    bool degenerate = false;
};

ConeResult cone_axis(const std::vector<Vec>& vectors, double opt_tol = kHullOptTol);

}  // namespace reflectics
