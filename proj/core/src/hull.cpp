#include "reflectics/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reflectics {

namespace {

// Affine minimization over the current corral: minimize |P v|^2 s.t. sum v = 1.
Eigen::VectorXd affine_min(const std::vector<Vec>& points, const std::vector<int>& corral) {
    const int k = static_cast<int>(corral.size());
    Mat sys(k + 1, k + 1);
    sys.setZero();
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b)
            sys(a, b) = 2.0 * points[static_cast<size_t>(corral[a])].dot(points[static_cast<size_t>(corral[b])]);
        sys(a, k) = 1.0;
        sys(k, a) = 1.0;
    }
    Vec rhs = Vec::Zero(k + 1);
    rhs(k) = 1.0;
    Vec sol = sys.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(k);
}

}  // namespace

HullResult min_norm_in_hull(const std::vector<Vec>& vectors, double opt_tol) {
    require(!vectors.empty(), "min_norm_in_hull: empty input");
    const Eigen::Index dim = vectors.front().size();
    for (const auto& v : vectors) {
        require(v.size() == dim, "min_norm_in_hull: inconsistent dimensions");
        require(std::abs(v.norm() - 1.0) <= 1e-9, "min_norm_in_hull: input is not a unit vector");
    }

    const int m = static_cast<int>(vectors.size());
    std::vector<int> corral = {0};
    std::vector<double> weights = {1.0};

    Vec x = vectors[0];
    const int max_outer = 64 + 16 * m;
    for (int outer = 0; outer < max_outer; ++outer) {
        // Most violated KKT direction.
        int best = -1;
        double best_dot = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            const double d = x.dot(vectors[static_cast<size_t>(j)]);
            if (d < best_dot) {
                best_dot = d;
                best = j;
            }
        }
        if (best_dot >= x.squaredNorm() - opt_tol) break;
        if (std::find(corral.begin(), corral.end(), best) == corral.end()) {
            corral.push_back(best);
            weights.push_back(0.0);
        }

        // Minor cycle: descend to the affine minimizer, stepping back to the
        // simplex boundary and shrinking the corral as needed.
        for (int minor = 0; minor < 4 * m + 16; ++minor) {
            Vec v = affine_min(vectors, corral);
            if (v.minCoeff() > -1e-13) {
                for (size_t i = 0; i < corral.size(); ++i) weights[i] = std::max(v(static_cast<Eigen::Index>(i)), 0.0);
                break;
            }
            double theta = 1.0;
            for (size_t i = 0; i < corral.size(); ++i) {
                const double vi = v(static_cast<Eigen::Index>(i));
                if (vi < weights[i]) theta = std::min(theta, weights[i] / (weights[i] - vi));
            }
            for (size_t i = 0; i < corral.size(); ++i)
                weights[i] = (1.0 - theta) * weights[i] + theta * v(static_cast<Eigen::Index>(i));
            // Prune zeroed members.
            std::vector<int> nc;
            std::vector<double> nw;
            for (size_t i = 0; i < corral.size(); ++i) {
                if (weights[i] > 1e-12) {
                    nc.push_back(corral[i]);
                    nw.push_back(weights[i]);
                }
            }
            if (nc.empty()) {
                nc.push_back(corral[0]);
                nw.push_back(1.0);
            }
            corral = std::move(nc);
            weights = std::move(nw);
        }

        // Renormalize and recompute the candidate point.
        double s = 0.0;
        for (double w : weights) s += w;
        for (double& w : weights) w /= s;
        x.setZero();
        for (size_t i = 0; i < corral.size(); ++i) x += weights[i] * vectors[static_cast<size_t>(corral[i])];
    }

    HullResult res;
    res.coefficients.assign(static_cast<size_t>(m), 0.0);
    for (size_t i = 0; i < corral.size(); ++i) res.coefficients[static_cast<size_t>(corral[i])] += weights[i];
    res.min_norm_point = x;
    res.distance = x.norm();
    return res;
}

ConeResult cone_axis(const std::vector<Vec>& vectors, double opt_tol) {
    const HullResult hull = min_norm_in_hull(vectors, opt_tol);
    ConeResult res;
    if (hull.distance <= std::sqrt(opt_tol)) {
        res.axis = Vec::Zero(vectors.front().size());
        res.beta = 0.0;
        res.degenerate = true;
        return res;
    }
    res.axis = hull.min_norm_point / hull.distance;
    res.beta = std::numeric_limits<double>::infinity();
    for (const auto& v : vectors) res.beta = std::min(res.beta, res.axis.dot(v));
    return res;
}

}  // namespace reflectics
