#include "reflectics/planet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "reflectics/stats.hpp"
#include "reflectics/union_find.hpp"

namespace reflectics {
namespace planet {

namespace {

int pair_index(int n, int i, int j) {
    // Pairs follow the 3n single-particle constraints, ordered (0,1), (0,2), ...
    return 3 * n + (i * (2 * n - i - 1)) / 2 + (j - i - 1);
}

std::string pair_id(int i, int j) { return "pair:" + std::to_string(i) + ":" + std::to_string(j); }

double tail_grad_floor(const PlanetModel& m) { return 2.0 * std::sqrt(2.0) * (m.R + m.r_minus); }

}  // namespace

GravityTriple log_gravity(double c) {
    require(c > 0.0, "log_gravity: coefficient must be positive");
    return {[c](double rho) { return c * std::log(rho); },
            [c](double rho) { return c / rho; },
            [c](double rho) { return -c / (rho * rho); }};
}

void PlanetModel::validate(double probe_lo, double probe_hi) const {
    require(n >= 1 && d >= 1, "planet model: need n >= 1, d >= 1");
    require(R > 0.0, "planet model: R must be positive");
    require(0.0 < r_minus && r_minus < r_plus, "planet model: need 0 < r_minus < r_plus");
    require(elasticity > 0.0, "planet model: elasticity must be positive");
    require(temperature > 0.0, "planet model: temperature must be positive");
    require(static_cast<bool>(gravity.value) && static_cast<bool>(gravity.deriv) &&
                static_cast<bool>(gravity.deriv2),
            "planet model: gravity triple incomplete");

    double tail_ell = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 64; ++i) {
        const double rho = probe_lo * std::pow(probe_hi / probe_lo, i / 64.0);
        require(gravity.deriv(rho) > 0.0, "planet model: G' must be positive");
        require(gravity.deriv2(rho) <= 1e-12, "planet model: G'' must be nonpositive");
        if (rho >= 0.1 * probe_hi) tail_ell = std::min(tail_ell, rho * gravity.deriv(rho));
    }
    require(tail_ell > 0.0, "planet model: rho G'(rho) must stay positive on the tail");
}

ConstraintSet build_constraints(const PlanetModel& model) {
    model.validate();
    const int n = model.n, d = model.d, D = model.dim();
    const double R = model.R;

    std::vector<Constraint> cs;
    cs.reserve(static_cast<size_t>(3 * n + n * (n - 1) / 2));

    for (int i = 0; i < n; ++i) {
        cs.push_back({"planet:" + std::to_string(i),
                      [i, d, R](const Vec& x) {
                          const double r = radius(x, i, d);
                          return position(x, i, d).squaredNorm() - (R + r) * (R + r);
                      },
                      [i, d, D, R](const Vec& x) {
                          Vec g = Vec::Zero(D);
                          g.segment(i * (d + 1), d) = 2.0 * position(x, i, d);
                          g(i * (d + 1) + d) = -2.0 * (R + radius(x, i, d));
                          return g;
                      },
                      2.0, tail_grad_floor(model)});
        cs.push_back({"rmax:" + std::to_string(i),
                      [i, d, rp = model.r_plus](const Vec& x) { return rp - radius(x, i, d); },
                      [i, d, D](const Vec&) {
                          Vec g = Vec::Zero(D);
                          g(i * (d + 1) + d) = -1.0;
                          return g;
                      },
                      0.0, 1.0});
        cs.push_back({"rmin:" + std::to_string(i),
                      [i, d, rm = model.r_minus](const Vec& x) { return radius(x, i, d) - rm; },
                      [i, d, D](const Vec&) {
                          Vec g = Vec::Zero(D);
                          g(i * (d + 1) + d) = 1.0;
                          return g;
                      },
                      0.0, 1.0});
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            cs.push_back({pair_id(i, j),
                          [i, j, d](const Vec& x) {
                              const double s = radius(x, i, d) + radius(x, j, d);
                              return (position(x, i, d) - position(x, j, d)).squaredNorm() - s * s;
                          },
                          [i, j, d, D](const Vec& x) {
                              Vec g = Vec::Zero(D);
                              const Vec diff = position(x, i, d) - position(x, j, d);
                              const double s = radius(x, i, d) + radius(x, j, d);
                              g.segment(i * (d + 1), d) = 2.0 * diff;
                              g.segment(j * (d + 1), d) = -2.0 * diff;
                              g(i * (d + 1) + d) = -2.0 * s;
                              g(j * (d + 1) + d) = -2.0 * s;
                              return g;
                          },
                          4.0, 8.0 * model.r_minus});
        }
    }

    // Diagonal obliquity: n repetitions of (tau, ..., tau, tau * elasticity).
    Mat theta = Mat::Zero(D, D);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) theta(i * (d + 1) + k, i * (d + 1) + k) = model.temperature;
        theta(i * (d + 1) + d, i * (d + 1) + d) = model.temperature * model.elasticity;
    }

    ConstraintSet set(std::move(cs), D, std::move(theta));
    set.set_scale(model.R + model.r_plus);

    if (n > 64) {
        // Neighbor grid over particle positions: pairs can only be violated
        // within adjacent cells of size 2 r_plus. Exact for hard cores.
        const double cell = 2.0 * model.r_plus;
        set.candidate_filter = [n, d, cell](const Vec& x) {
            std::vector<int> out;
            out.reserve(static_cast<size_t>(4 * n));
            for (int i = 0; i < 3 * n; ++i) out.push_back(i);
            std::unordered_map<long long, std::vector<int>> grid;
            auto key = [&](const Vec& p) {
                long long k = 0;
                for (int c = 0; c < std::min(d, 3); ++c)
                    k = k * 2097152LL + (static_cast<long long>(std::floor(p(c) / cell)) & 0x1FFFFF);
                return k;
            };
            std::vector<long long> keys(static_cast<size_t>(n));
            std::vector<Vec> pos(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                pos[static_cast<size_t>(i)] = position(x, i, d);
                keys[static_cast<size_t>(i)] = key(pos[static_cast<size_t>(i)]);
                grid[keys[static_cast<size_t>(i)]].push_back(i);
            }
            const double reach = 2.0 * cell;  // conservative adjacency radius
            for (int i = 0; i < n; ++i) {
                for (const auto& [k, members] : grid) {
                    (void)k;
                    for (int j : members) {
                        if (j <= i) continue;
                        if ((pos[static_cast<size_t>(i)] - pos[static_cast<size_t>(j)]).norm() < reach)
                            out.push_back(pair_index(n, i, j));
                    }
                }
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
    }
    return set;
}

DynamicsSpec build_dynamics(const PlanetModel& model) {
    ConstraintSet set = build_constraints(model);
    const Mat theta = set.obliquity();
    const int n = model.n, d = model.d, D = model.dim();
    auto gprime = model.gravity.deriv;

    return DynamicsSpec{
        std::move(set),
        [theta](const Vec&) { return theta; },
        [n, d, D, gprime](const Vec& x) {
            Vec b = Vec::Zero(D);
            for (int i = 0; i < n; ++i) {
                const Vec p = position(x, i, d);
                const double rho = p.norm();
                if (rho > 0.0) b.segment(i * (d + 1), d) = -(gprime(rho) / rho) * p;
            }
            return b;
        },
        "gravity drift bounded and Lipschitz on the closed domain (rho >= R + r_minus)"};
}

std::map<std::string, std::vector<double>> rescale_local_times(const PathRecord& path,
                                                               const PlanetModel& model) {
    const int n = model.n, d = model.d;
    const long rows = path.states.rows();
    require(rows >= 1, "rescale_local_times: empty path");
    require(static_cast<int>(path.constraint_ids.size()) == 3 * n + n * (n - 1) / 2,
            "rescale_local_times: path does not match the planet constraint layout");
    require(path.constraint_ids[0] == "planet:0",
            "rescale_local_times: path was not produced from a planet dynamics spec");

    const double tau2 = model.temperature * model.temperature;
    const double el2 = model.elasticity * model.elasticity;

    std::map<std::string, std::vector<double>> out;
    auto& ids = path.constraint_ids;
    for (size_t c = 0; c < ids.size(); ++c) {
        const std::string& id = ids[c];
        std::string key;
        enum { PlanetC, RMax, RMin, Pair } kind;
        int pi = 0, pj = 0;
        if (id.rfind("planet:", 0) == 0) {
            kind = PlanetC;
            pi = std::stoi(id.substr(7));
            key = "LR:" + std::to_string(pi);
        } else if (id.rfind("rmax:", 0) == 0) {
            kind = RMax;
            key = "L+:" + id.substr(5);
        } else if (id.rfind("rmin:", 0) == 0) {
            kind = RMin;
            key = "L-:" + id.substr(5);
        } else {
            kind = Pair;
            const auto c1 = id.find(':'), c2 = id.rfind(':');
            pi = std::stoi(id.substr(c1 + 1, c2 - c1 - 1));
            pj = std::stoi(id.substr(c2 + 1));
            key = "L:" + std::to_string(pi) + ":" + std::to_string(pj);
        }

        std::vector<double> series(static_cast<size_t>(rows), 0.0);
        double cum = 0.0;
        for (long m = 1; m < rows; ++m) {
            const double dl = path.local_times(m, static_cast<Eigen::Index>(c)) -
                              path.local_times(m - 1, static_cast<Eigen::Index>(c));
            const Vec state = path.states.row(m).transpose();
            double factor = 0.0;
            switch (kind) {
                case PlanetC: factor = 2.0 * tau2 * (model.R + radius(state, pi, d)); break;
                case RMax:
                case RMin: factor = tau2 * el2; break;
                case Pair: factor = 2.0 * tau2 * (radius(state, pi, d) + radius(state, pj, d)); break;
            }
            cum += factor * dl;
            series[static_cast<size_t>(m)] = cum;
        }
        out.emplace(std::move(key), std::move(series));
    }
    return out;
}

ContactGraph contact_graph(const Vec& x, const PlanetModel& model, double act_tol) {
    const int n = model.n, d = model.d;
    require(x.size() == model.dim(), "contact_graph: dimension mismatch");
    require(act_tol > 0.0, "contact_graph: act_tol must be positive");

    ContactGraph g;
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        const double ri = radius(x, i, d);
        const double fR = position(x, i, d).squaredNorm() - (model.R + ri) * (model.R + ri);
        if (fR <= act_tol) g.planet_contacts.push_back(i);
        for (int j = i + 1; j < n; ++j) {
            const double s = ri + radius(x, j, d);
            const double f = (position(x, i, d) - position(x, j, d)).squaredNorm() - s * s;
            if (f <= act_tol) {
                g.edges.push_back({i, j});
                uf.merge(i, j);
            }
        }
    }
    g.cluster_of.resize(static_cast<size_t>(n));
    std::map<int, std::vector<int>> by_root;
    for (int i = 0; i < n; ++i) {
        g.cluster_of[static_cast<size_t>(i)] = uf.find(i);
        by_root[uf.find(i)].push_back(i);
    }
    for (auto& [root, members] : by_root) {
        (void)root;
        g.clusters.push_back(std::move(members));
    }
    return g;
}

ConeCertificate cone_vector(const Vec& x, const PlanetModel& model, double act_tol) {
    const int n = model.n, d = model.d;
    const ContactGraph graph = contact_graph(x, model, act_tol);

    std::vector<bool> planet_touch(static_cast<size_t>(n), false);
    for (int i : graph.planet_contacts) planet_touch[static_cast<size_t>(i)] = true;
    std::vector<bool> cluster_touches(static_cast<size_t>(n), false);
    for (const auto& cluster : graph.clusters) {
        bool touches = false;
        for (int i : cluster) touches = touches || planet_touch[static_cast<size_t>(i)];
        for (int i : cluster) cluster_touches[static_cast<size_t>(i)] = touches;
    }

    ConeCertificate cert;
    cert.v = Vec::Zero(model.dim());
    for (const auto& cluster : graph.clusters) {
        Vec mean = Vec::Zero(d);
        for (int i : cluster) mean += position(x, i, d);
        mean /= static_cast<double>(cluster.size());
        for (int i : cluster) {
            if (cluster_touches[static_cast<size_t>(i)])
                cert.v.segment(i * (d + 1), d) = position(x, i, d);
            else
                cert.v.segment(i * (d + 1), d) = position(x, i, d) - mean;
        }
    }
    bool any_active = !graph.edges.empty() || !graph.planet_contacts.empty();
    for (int i = 0; i < n; ++i) {
        const double r = radius(x, i, d);
        if (r - model.r_minus <= act_tol) {
            cert.v(i * (d + 1) + d) = model.r_minus / 2.0;
            any_active = true;
        } else if (model.r_plus - r <= act_tol) {
            cert.v(i * (d + 1) + d) = -model.r_minus / 2.0;
            any_active = true;
        }
    }
    require(any_active, "cone_vector: no active constraint at x");

    // Normalized inner products against every active constraint gradient.
    const ConstraintSet set = build_constraints(model);
    for (int c = 0; c < set.size(); ++c) {
        if (set.at(c).value(x) > act_tol) continue;
        const Vec g = set.at(c).gradient(x);
        cert.inner[set.at(c).id] = cert.v.dot(g) / g.norm();
    }

    const double nn = static_cast<double>(n);
    const double rp = model.r_plus, rm = model.r_minus;
    cert.v_sq = cert.v.squaredNorm();
    cert.v_sq_bound = 2.0 * nn * (model.R + rp) * (model.R + rp) +
                      (4.0 / 3.0) * rp * rp * (nn - 1.0) * nn * (2.0 * nn - 1.0) +
                      (2.0 / 3.0) * rp * rp * nn * (nn - 1.0) * (2.0 * nn - 1.0) +
                      nn * rm * rm / 4.0;
    return cert;
}

namespace {

// Feasibility of particle k at position y, everything else frozen.
bool placement_ok(const Vec& x, const PlanetModel& model, int k, const Vec& y, double slack) {
    const int d = model.d;
    const double rk = radius(x, k, d);
    if (y.norm() < model.R + rk - slack) return false;
    for (int j = 0; j < model.n; ++j) {
        if (j == k) continue;
        if ((y - position(x, j, d)).norm() < rk + radius(x, j, d) - slack) return false;
    }
    return true;
}

// Push y out of any overlapped obstacle; a handful of sweeps.
bool project_out(const Vec& x, const PlanetModel& model, int k, Vec& y, double slack) {
    const int d = model.d;
    const double rk = radius(x, k, d);
    for (int sweep = 0; sweep < 30; ++sweep) {
        bool clean = true;
        const double rho = y.norm();
        if (rho < model.R + rk) {
            y *= (model.R + rk + 1e-12) / std::max(rho, 1e-300);
            clean = false;
        }
        for (int j = 0; j < model.n; ++j) {
            if (j == k) continue;
            const Vec pj = position(x, j, d);
            Vec diff = y - pj;
            const double dist = diff.norm();
            const double need = rk + radius(x, j, d);
            if (dist < need) {
                if (dist < 1e-14) diff = Vec::Unit(d, 0);
                y = pj + diff * ((need + 1e-12) / std::max(dist, 1e-300));
                clean = false;
            }
        }
        if (clean) return placement_ok(x, model, k, y, slack);
    }
    return false;
}

}  // namespace

double min_radial_norm(const Vec& x, const PlanetModel& model, int k, int multistarts,
                       uint64_t seed) {
    const int d = model.d;
    require(k >= 0 && k < model.n, "min_radial_norm: particle index out of range");
    const double slack = 1e-9 * (model.R + model.r_plus);
    const Vec xk = position(x, k, d);
    double best = xk.norm();

    if (multistarts <= 0) multistarts = 8 + 2 * d;
    RngStream rng(seed, 0x6D696E726164ULL + static_cast<uint64_t>(k));

    for (int start = 0; start < multistarts; ++start) {
        Vec y = xk;
        if (start > 0) {
            Vec kick(d);
            for (int c = 0; c < d; ++c) kick(c) = rng.normal();
            kick *= (2.0 * model.r_plus * rng.u01()) / std::max(kick.norm(), 1e-300);
            y += kick;
            if (!project_out(x, model, k, y, slack)) continue;
        }

        double step = 0.25 * std::max(y.norm() - model.R, model.r_plus);
        const double step_floor = 1e-9 * (model.R + model.r_plus);
        for (int iter = 0; iter < 600 && step > step_floor; ++iter) {
            const double rho = y.norm();
            if (rho < 1e-12) break;
            Vec cand = y - std::min(step, rho) * (y / rho);
            if (!project_out(x, model, k, cand, slack)) {
                step *= 0.5;
                continue;
            }
            if (cand.norm() < y.norm() - 1e-13) {
                y = cand;
                step = std::min(step * 1.5, 0.25 * std::max(y.norm() - model.R, model.r_plus));
            } else {
                step *= 0.5;
            }
        }
        best = std::min(best, y.norm());
    }
    return best;
}

bool in_A_eps(const Vec& x, const PlanetModel& model, double eps, uint64_t seed) {
    require(eps > 0.0, "in_A_eps: eps must be positive");
    for (int k = 0; k < model.n; ++k) {
        const double gain = position(x, k, model.d).norm() - min_radial_norm(x, model, k, 0, seed);
        if (gain > eps) return true;
    }
    return false;
}

Vec reference_config(const PlanetModel& model) {
    const int n = model.n, d = model.d;
    const double rmid = 0.5 * (model.r_minus + model.r_plus);
    double ring = model.R + 2.0 * model.r_plus;
    if (n > 1) {
        const double need = (2.2 * model.r_plus) / (2.0 * std::sin(M_PI / n));
        ring = std::max(ring, need);
    }
    Vec x = Vec::Zero(model.dim());
    for (int i = 0; i < n; ++i) {
        const double ang = 2.0 * M_PI * i / std::max(1, n);
        x(i * (d + 1) + 0) = ring * std::cos(ang);
        if (d >= 2) x(i * (d + 1) + 1) = ring * std::sin(ang);
        x(i * (d + 1) + d) = rmid;
    }
    return x;
}

Vec packed_config(const PlanetModel& model) {
    const int n = model.n, d = model.d;
    const double rmid = 0.5 * (model.r_minus + model.r_plus);
    const double slack = 1e-3 * rmid;

    Vec x = Vec::Zero(model.dim());
    double shell = model.R + rmid + slack;
    int placed = 0;
    while (placed < n) {
        // Angular pitch that keeps neighbouring spheres strictly apart.
        const double pitch = 2.0 * std::asin(std::min(1.0, (rmid + slack) / shell)) * 1.05;
        const int capacity = d >= 2 ? std::max(1, static_cast<int>(2.0 * M_PI / pitch)) : 2;
        const int here = std::min(n - placed, capacity);
        for (int j = 0; j < here; ++j) {
            const int i = placed + j;
            if (d >= 2) {
                const double ang = pitch * j + 0.1 * (shell - model.R);  // stagger shells
                x(i * (d + 1) + 0) = shell * std::cos(ang);
                x(i * (d + 1) + 1) = shell * std::sin(ang);
            } else {
                x(i * (d + 1) + 0) = j == 0 ? shell : -shell;
            }
            x(i * (d + 1) + d) = rmid;
        }
        placed += here;
        shell += 2.0 * rmid + 2.0 * slack;
    }
    return x;
}

Vec gibbs_proposal_scale(const PlanetModel& model) {
    // Radial equilibrium spread scales like tau^2 / (rho G'(rho)).
    double c_eff = 1.0;
    for (int i = 0; i <= 16; ++i) {
        const double rho = model.R * std::pow(100.0, i / 16.0);
        c_eff = std::max(c_eff, rho * model.gravity.deriv(rho));
    }
    const double tau2 = model.temperature * model.temperature;
    const double pos = std::clamp(0.7 * (model.R + model.r_minus) * tau2 / c_eff, 1e-4 * model.R,
                                  0.5 * model.R);
    const double rad = 0.25 * (model.r_plus - model.r_minus);
    Vec scale(model.dim());
    for (int i = 0; i < model.n; ++i) {
        for (int k = 0; k < model.d; ++k) scale(i * (model.d + 1) + k) = pos;
        scale(i * (model.d + 1) + model.d) = rad;
    }
    return scale;
}

GibbsSpec gibbs_spec(const PlanetModel& model) {
    const int n = model.n, d = model.d;
    const double tau2 = model.temperature * model.temperature;
    auto gval = model.gravity.value;

    GibbsSpec spec{build_constraints(model),
                   [n, d, tau2, gval](const Vec& x) {
                       double phi = 0.0;
                       for (int i = 0; i < n; ++i) phi += gval(position(x, i, d).norm());
                       return phi / tau2;
                   },
                   Vec(model.dim()),
                   Vec(model.dim())};

    const double L = 2.5 * (model.R + model.r_plus);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            spec.envelope_lo(i * (d + 1) + k) = -L;
            spec.envelope_hi(i * (d + 1) + k) = L;
        }
        spec.envelope_lo(i * (d + 1) + d) = model.r_minus;
        spec.envelope_hi(i * (d + 1) + d) = model.r_plus;
    }
    spec.log_density_cap = -static_cast<double>(n) * gval(model.R + model.r_minus) / tau2;

    // Rigid rotation of one particle about the origin: symmetric, leaves phi
    // invariant, mixes angles at any temperature.
    spec.extra_move = [n, d](const Vec& x, RngStream& rng) {
        Vec y = x;
        const int i = static_cast<int>(rng.index(static_cast<uint64_t>(n)));
        int a = 0, b = 1;
        if (d > 2) {
            a = static_cast<int>(rng.index(static_cast<uint64_t>(d)));
            b = static_cast<int>(rng.index(static_cast<uint64_t>(d - 1)));
            if (b >= a) ++b;
        }
        const double ang = 2.0 * M_PI * rng.u01() - M_PI;
        const double ca = std::cos(ang), sa = std::sin(ang);
        const double xa = y(i * (d + 1) + a), xb = y(i * (d + 1) + b);
        y(i * (d + 1) + a) = ca * xa - sa * xb;
        y(i * (d + 1) + b) = sa * xa + ca * xb;
        return y;
    };
    spec.extra_move_prob = (d >= 2) ? 0.25 : 0.0;
    spec.start = packed_config(model);
    return spec;
}

std::vector<CurvePoint> clustering_curve(const PlanetModel& model_template,
                                         const std::vector<double>& temperatures, double eps,
                                         long n_samples, uint64_t seed, const CurveOptions& opts) {
    require(!temperatures.empty(), "clustering_curve: no temperatures");
    require(n_samples > 0, "clustering_curve: n_samples must be positive");

    // Gate every temperature up front.
    if (!opts.override_integrability) {
        for (double tau : temperatures) {
            if (check_integrability(model_template.gravity, model_template.d, tau, opts.eta) !=
                IntegrabilityVerdict::Finite)
                throw std::runtime_error(
                    "clustering_curve: integrability unknown at tau=" + std::to_string(tau) +
                    " (use the override to proceed anyway)");
        }
    }

    std::vector<CurvePoint> curve(temperatures.size());
    const int workers = std::max(1, opts.workers);

    auto run_tau = [&](size_t t) {
        PlanetModel model = model_template;
        model.temperature = temperatures[t];
        GibbsSpec spec = gibbs_spec(model);
        const uint64_t tau_seed = seed ^ (0x746175ULL + 0x9E3779B9ULL * static_cast<uint64_t>(t));
        McmcResult mcmc = sample_mcmc(spec, n_samples, -1, gibbs_proposal_scale(model), tau_seed,
                                      opts.thin);
        long hits = 0;
        for (size_t s = 0; s < mcmc.samples.size(); ++s) {
            if (in_A_eps(mcmc.samples[s], model, eps, tau_seed + 1000 + s)) ++hits;
        }
        const BinomialCi ci = wilson_interval(hits, n_samples);
        curve[t] = {temperatures[t], ci.estimate, ci.lo, ci.hi, n_samples};
    };

    if (workers == 1 || temperatures.size() == 1) {
        for (size_t t = 0; t < temperatures.size(); ++t) run_tau(t);
    } else {
        std::vector<std::thread> threads;
        std::atomic<size_t> next{0};
        for (int w = 0; w < workers; ++w)
            threads.emplace_back([&] {
                for (size_t t = next.fetch_add(1); t < temperatures.size(); t = next.fetch_add(1))
                    run_tau(t);
            });
        for (auto& th : threads) th.join();
    }
    return curve;
}

}  // namespace planet
}  // namespace reflectics
