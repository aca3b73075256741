#pragma once

// Brute-force reference solvers used only by the test suite. Deliberately
// independent of the library's algorithms: plain refining grid searches.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "reflectics/types.hpp"

namespace reflectics::test {

// Min over the convex hull of |sum w_i u_i|, by exhaustive enumeration of
// the simplex faces (exact up to the conditioning of tiny Gram systems).
double simplex_min_norm_oracle(const std::vector<Vec>& vectors);

// max over unit v of min_i v . u_i, by a refining direction grid (angles in
// 2D, Fibonacci sphere + local refinement in 3D). Accurate to ~1e-4.
double sphere_maxmin_oracle(const std::vector<Vec>& vectors);

// Deterministic random unit vectors.
std::vector<Vec> random_unit_vectors(int dim, int count, uint64_t seed);

// Exact Euclidean projection onto the wedge of opening angle `angle_rad`
// about the positive x-axis (faces at +-angle/2).
Vec project_wedge(const Vec& y, double angle_rad);

// Brute-force transitive closure of a contact relation (reference for the
// union-find cluster labels): returns component id per vertex.
std::vector<int> closure_components(int n, const std::vector<std::pair<int, int>>& edges);

// Worst relative error between an analytic gradient and central finite
// differences at step h, over all coordinates.
double grad_fd_error(const std::function<double(const Vec&)>& f,
                     const std::function<Vec(const Vec&)>& grad, const Vec& x, double h = 1e-5);

}  // namespace reflectics::test
