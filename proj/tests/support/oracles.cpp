#include "oracles.hpp"

#include <cmath>
#include <functional>

#include "reflectics/rng.hpp"

namespace reflectics::test {

namespace {

double hull_norm(const std::vector<Vec>& us, const Vec& w) {
    Vec z = Vec::Zero(us.front().size());
    for (size_t i = 0; i < us.size(); ++i) z += w(static_cast<Eigen::Index>(i)) * us[i];
    return z.norm();
}

}  // namespace

double simplex_min_norm_oracle(const std::vector<Vec>& vectors) {
    // Exhaustive face enumeration. The minimizer of |sum w_i u_i| over the
    // weight simplex lies in the relative interior of some face, where it is
    // the unconstrained affine minimizer of that face's vertex set with
    // nonnegative barycentric weights. Every such candidate is a hull point,
    // so the smallest candidate norm is the exact answer.
    const int m = static_cast<int>(vectors.size());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const int k = static_cast<int>(idx.size());

        // Minimize |sum w_i u_i|^2 subject to sum w_i = 1: KKT system on the
        // Gram matrix with one Lagrange multiplier.
        Mat sys = Mat::Zero(k + 1, k + 1);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b)
                sys(a, b) = vectors[static_cast<size_t>(idx[static_cast<size_t>(a)])].dot(
                    vectors[static_cast<size_t>(idx[static_cast<size_t>(b)])]);
            sys(a, k) = 1.0;
            sys(k, a) = 1.0;
        }
        Vec rhs = Vec::Zero(k + 1);
        rhs(k) = 1.0;
        const Vec sol = sys.completeOrthogonalDecomposition().solve(rhs);

        double wsum = 0.0;
        bool nonneg = true;
        for (int a = 0; a < k; ++a) {
            wsum += sol(a);
            if (sol(a) < -1e-10) nonneg = false;
        }
        if (!nonneg || std::abs(wsum - 1.0) > 1e-8) continue;

        Vec w = Vec::Zero(m);
        for (int a = 0; a < k; ++a) w(idx[static_cast<size_t>(a)]) = std::max(0.0, sol(a)) / wsum;
        best = std::min(best, hull_norm(vectors, w));
    }
    return best;
}

namespace {

double min_dot(const std::vector<Vec>& us, const Vec& v) {
    double m = std::numeric_limits<double>::infinity();
    for (const Vec& u : us) m = std::min(m, v.dot(u));
    return m;
}

}  // namespace

namespace {

// Tangent-plane grid refinement around one unit direction.
double refine_direction_3d(const std::vector<Vec>& us, Vec v, double start_width, int levels) {
    double best = min_dot(us, v);
    double width = start_width;
    for (int level = 0; level < levels; ++level) {
        Vec t1(3);
        if (std::abs(v(0)) < 0.9)
            t1 << 0, -v(2), v(1);
        else
            t1 << -v(2), 0, v(0);
        t1.normalize();
        Vec t2(3);
        t2 << v(1) * t1(2) - v(2) * t1(1), v(2) * t1(0) - v(0) * t1(2),
            v(0) * t1(1) - v(1) * t1(0);
        const Vec center = v;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -10; j <= 10; ++j) {
                Vec cand = (center + width * i / 10.0 * t1 + width * j / 10.0 * t2).normalized();
                const double s = min_dot(us, cand);
                if (s > best) {
                    best = s;
                    v = cand;
                }
            }
        }
        width /= 6.0;
    }
    return best;
}

}  // namespace

double sphere_maxmin_oracle(const std::vector<Vec>& vectors) {
    const int dim = static_cast<int>(vectors.front().size());

    if (dim == 2) {
        const int n = 8000;
        std::vector<std::pair<double, double>> scored;  // (value, angle)
        scored.reserve(n);
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * M_PI * i / n;
            Vec v(2);
            v << std::cos(a), std::sin(a);
            scored.push_back({min_dot(vectors, v), a});
        }
        std::sort(scored.begin(), scored.end(),
                  [](const auto& x, const auto& y) { return x.first > y.first; });
        double best = scored.front().first;
        // The max-min landscape has ridges; refine several leading starts.
        for (int s = 0; s < 8; ++s) {
            double a0 = scored[static_cast<size_t>(s)].second;
            double half = M_PI / n;
            for (int level = 0; level < 5; ++level) {
                double local_best_a = a0;
                for (int i = -50; i <= 50; ++i) {
                    const double a = a0 + half * i / 50.0;
                    Vec v(2);
                    v << std::cos(a), std::sin(a);
                    const double val = min_dot(vectors, v);
                    if (val > best) {
                        best = val;
                        local_best_a = a;
                    }
                }
                a0 = local_best_a;
                half /= 25.0;
            }
        }
        return best;
    }

    // Fibonacci sphere scan; keep the leading candidates (the global ridge
    // can be narrow) and refine each on its tangent plane.
    const int n = 20000;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    std::vector<std::pair<double, Vec>> scored;
    scored.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        Vec v(3);
        v << r * std::cos(a), r * std::sin(a), z;
        scored.push_back({min_dot(vectors, v), v});
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    double best = scored.front().first;
    const size_t starts = std::min<size_t>(40, scored.size());
    for (size_t s = 0; s < starts; ++s)
        best = std::max(best, refine_direction_3d(vectors, scored[s].second, 0.05, 6));
    return best;
}

std::vector<Vec> random_unit_vectors(int dim, int count, uint64_t seed) {
    RngStream rng(seed, 0x756E6974ULL);
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        Vec v(dim);
        for (int k = 0; k < dim; ++k) v(k) = rng.normal();
        if (v.norm() < 1e-6) continue;
        out.push_back(v.normalized());
    }
    return out;
}

Vec project_wedge(const Vec& y, double angle_rad) {
    const double s = std::sin(angle_rad / 2), c = std::cos(angle_rad / 2);
    Vec n1(2), n2(2);
    n1 << s, -c;  // upper face
    n2 << s, c;   // lower face
    if (n1.dot(y) >= 0.0 && n2.dot(y) >= 0.0) return y;

    Vec best = Vec::Zero(2);  // apex is always admissible
    double best_d = y.norm();
    for (const Vec& n : {n1, n2}) {
        Vec p = y - n.dot(y) * n;
        const Vec& other = (&n == &n1) ? n2 : n1;
        if (other.dot(p) >= -1e-15 && n1.dot(p) >= -1e-15 && n2.dot(p) >= -1e-15) {
            const double d = (y - p).norm();
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
    }
    return best;
}

std::vector<int> closure_components(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<char>> reach(static_cast<size_t>(n),
                                         std::vector<char>(static_cast<size_t>(n), 0));
    for (int i = 0; i < n; ++i) reach[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    for (const auto& [a, b] : edges) {
        reach[static_cast<size_t>(a)][static_cast<size_t>(b)] = 1;
        reach[static_cast<size_t>(b)][static_cast<size_t>(a)] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (reach[static_cast<size_t>(i)][static_cast<size_t>(k)] &&
                    reach[static_cast<size_t>(k)][static_cast<size_t>(j)])
                    reach[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
    std::vector<int> comp(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (comp[static_cast<size_t>(i)] >= 0) continue;
        for (int j = 0; j < n; ++j)
            if (reach[static_cast<size_t>(i)][static_cast<size_t>(j)])
                comp[static_cast<size_t>(j)] = i;
    }
    return comp;
}

double grad_fd_error(const std::function<double(const Vec&)>& f,
                     const std::function<Vec(const Vec&)>& grad, const Vec& x, double h) {
    const Vec g = grad(x);
    const double scale = std::max(1.0, g.norm());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vec hi = x, lo = x;
        hi(k) += h;
        lo(k) -= h;
        const double fd = (f(hi) - f(lo)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g(k)) / scale);
    }
    return worst;
}

}  // namespace reflectics::test
