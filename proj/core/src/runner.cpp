#include "reflectics/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "reflectics/compat.hpp"
#include "reflectics/planet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace reflectics {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> parse_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string make_csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        require(fields[i].find(',') == std::string::npos &&
                    fields[i].find('\n') == std::string::npos,
                "make_csv_row: field contains a separator");
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp." +
                          std::to_string(static_cast<unsigned long>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

// --- domain registry --------------------------------------------------------

namespace {

planet::PlanetModel planet_model_from(const RunConfig& c) {
    planet::PlanetModel m;
    m.n = c.planet_n;
    m.d = c.planet_d;
    m.R = c.planet_R;
    m.r_minus = c.planet_r_minus;
    m.r_plus = c.planet_r_plus;
    m.elasticity = c.planet_elasticity;
    m.temperature = c.planet_temperature;
    m.gravity = planet::log_gravity(c.planet_gravity_coeff);
    return m;
}

int domain_dim(const RunConfig& c) {
    if (c.domain == "halfline") return 1;
    if (c.domain == "quadrant" || c.domain == "wedge") return 2;
    if (c.domain == "planet") return planet_model_from(c).dim();
    return c.dim;
}

// Sampling/search box adapted to the domain.
void domain_box(const RunConfig& c, Vec& lo, Vec& hi) {
    const int D = domain_dim(c);
    lo = Vec::Constant(D, c.box_lo);
    hi = Vec::Constant(D, c.box_hi);
    if (c.domain == "halfline") {
        lo(0) = std::max(c.box_lo, 0.0);
    } else if (c.domain == "quadrant") {
        lo = Vec::Constant(D, std::max(c.box_lo, 0.0));
    } else if (c.domain == "wedge") {
        lo(0) = 0.0;
        lo(1) = -c.box_hi;
    } else if (c.domain == "annulus") {
        lo = Vec::Constant(D, -c.annulus_outer);
        hi = Vec::Constant(D, c.annulus_outer);
    } else if (c.domain == "planet") {
        const planet::PlanetModel m = planet_model_from(c);
        const GibbsSpec spec = planet::gibbs_spec(m);
        lo = spec.envelope_lo;
        hi = spec.envelope_hi;
    }
}

}  // namespace

ConstraintSet domain_constraints(const RunConfig& c) {
    if (c.domain == "planet") return planet::build_constraints(planet_model_from(c));

    std::vector<Constraint> cs;
    int D = domain_dim(c);
    if (c.domain == "halfline") {
        cs.push_back({"wall", [](const Vec& x) { return x(0); },
                      [](const Vec&) { return Vec(Vec::Ones(1)); }, 0.0, 1.0});
    } else if (c.domain == "quadrant") {
        for (int i = 0; i < 2; ++i)
            cs.push_back({i == 0 ? "x" : "y", [i](const Vec& x) { return x(i); },
                          [i, D](const Vec&) { return Vec(Vec::Unit(D, i)); }, 0.0, 1.0});
    } else if (c.domain == "box") {
        for (int i = 0; i < D; ++i) {
            cs.push_back({"lo:" + std::to_string(i),
                          [i, lo = c.box_lo](const Vec& x) { return x(i) - lo; },
                          [i, D](const Vec&) { return Vec(Vec::Unit(D, i)); }, 0.0, 1.0});
            cs.push_back({"hi:" + std::to_string(i),
                          [i, hi = c.box_hi](const Vec& x) { return hi - x(i); },
                          [i, D](const Vec&) { return Vec(-Vec::Unit(D, i)); }, 0.0, 1.0});
        }
    } else if (c.domain == "wedge") {
        // Opening angle about the positive x-axis; boundary rays at +-a/2.
        const double a = c.wedge_angle_deg * M_PI / 180.0;
        const double s = std::sin(a / 2), co = std::cos(a / 2);
        cs.push_back({"upper", [s, co](const Vec& x) { return s * x(0) - co * x(1); },
                      [s, co](const Vec&) {
                          Vec g(2);
                          g << s, -co;
                          return g;
                      },
                      0.0, 1.0});
        cs.push_back({"lower", [s, co](const Vec& x) { return s * x(0) + co * x(1); },
                      [s, co](const Vec&) {
                          Vec g(2);
                          g << s, co;
                          return g;
                      },
                      0.0, 1.0});
    } else if (c.domain == "annulus") {
        cs.push_back({"inner", [r = c.annulus_inner](const Vec& x) { return x.norm() - r; },
                      [](const Vec& x) { return Vec(x / x.norm()); }, 1.0 / c.annulus_inner, 1.0});
        cs.push_back({"outer", [r = c.annulus_outer](const Vec& x) { return r - x.norm(); },
                      [](const Vec& x) { return Vec(-x / x.norm()); }, 1.0 / c.annulus_inner, 1.0});
    } else {
        throw ConfigError("unknown domain '" + c.domain + "'");
    }
    ConstraintSet set(std::move(cs), D, Mat(c.obliquity * Mat::Identity(D, D)));
    if (c.domain == "annulus")
        set.set_scale(c.annulus_outer);
    else
        set.set_scale(std::max(1.0, std::abs(c.box_hi)));
    return set;
}

double domain_phi(const RunConfig& c, const Vec& x) {
    if (c.domain == "planet") {
        const planet::PlanetModel m = planet_model_from(c);
        double phi = 0.0;
        for (int i = 0; i < m.n; ++i) phi += m.gravity.value(planet::position(x, i, m.d).norm());
        return phi / (m.temperature * m.temperature);
    }
    if (c.phi == "none") return 0.0;
    if (c.phi == "linear") return c.phi_coeff * x.sum();
    if (c.phi == "quadratic") return c.phi_coeff * x.squaredNorm();
    if (c.phi == "gravity_log") return c.phi_coeff * std::log(x.norm());
    throw ConfigError("unknown phi family '" + c.phi + "'");
}

Vec domain_phi_gradient(const RunConfig& c, const Vec& x) {
    if (c.phi == "none") return Vec::Zero(x.size());
    if (c.phi == "linear") return Vec(Vec::Constant(x.size(), c.phi_coeff));
    if (c.phi == "quadratic") return Vec(2.0 * c.phi_coeff * x);
    if (c.phi == "gravity_log") return Vec(c.phi_coeff * x / x.squaredNorm());
    throw ConfigError("unknown phi family '" + c.phi + "'");
}

DynamicsSpec domain_dynamics(const RunConfig& c) {
    if (c.domain == "planet") return planet::build_dynamics(planet_model_from(c));
    ConstraintSet set = domain_constraints(c);
    const Mat sigma = set.obliquity();
    const double th2 = c.obliquity * c.obliquity;
    RunConfig cc = c;
    return DynamicsSpec{std::move(set), [sigma](const Vec&) { return sigma; },
                        [cc, th2](const Vec& x) { return Vec(-0.5 * th2 * domain_phi_gradient(cc, x)); },
                        "built-in potential drift; Lipschitz on the envelope box"};
}

GibbsSpec domain_gibbs(const RunConfig& c) {
    if (c.domain == "planet") return planet::gibbs_spec(planet_model_from(c));
    GibbsSpec spec{domain_constraints(c), [cc = c](const Vec& x) { return domain_phi(cc, x); },
                   Vec(), Vec()};
    domain_box(c, spec.envelope_lo, spec.envelope_hi);
    return spec;
}

Vec domain_start(const RunConfig& c) {
    if (c.domain == "planet") return planet::reference_config(planet_model_from(c));
    Vec lo, hi;
    domain_box(c, lo, hi);
    return find_feasible_point(domain_constraints(c), lo, hi, c.seed ^ 0x5354415254ULL);
}

// --- artifacts --------------------------------------------------------------

namespace {

json config_echo(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["planet_mode"] = c.planet_mode;
    j["domain"] = c.domain;
    j["dim"] = c.dim;
    j["box_lo"] = c.box_lo;
    j["box_hi"] = c.box_hi;
    j["wedge_angle_deg"] = c.wedge_angle_deg;
    j["annulus_inner"] = c.annulus_inner;
    j["annulus_outer"] = c.annulus_outer;
    j["obliquity"] = c.obliquity;
    j["phi"] = c.phi;
    j["phi_coeff"] = c.phi_coeff;
    j["dt"] = c.dt;
    j["T"] = c.T;
    j["n_samples"] = c.n_samples;
    j["burn_in"] = c.burn_in;
    j["thin"] = c.thin;
    j["record_stride"] = c.record_stride;
    j["n_paths"] = c.n_paths;
    j["alpha"] = c.alpha;
    j["n_boundary_samples"] = c.n_boundary_samples;
    j["refute_tol"] = c.refute_tol;
    j["proposal_scale"] = c.proposal_scale;
    j["planet_n"] = c.planet_n;
    j["planet_d"] = c.planet_d;
    j["planet_R"] = c.planet_R;
    j["planet_r_minus"] = c.planet_r_minus;
    j["planet_r_plus"] = c.planet_r_plus;
    j["planet_elasticity"] = c.planet_elasticity;
    j["planet_temperature"] = c.planet_temperature;
    j["planet_gravity_coeff"] = c.planet_gravity_coeff;
    j["temperatures"] = c.temperatures;
    j["eps"] = c.eps;
    j["eta"] = c.eta;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    j["format"] = c.format;
    j["workers"] = c.workers;
    j["override_integrability"] = c.override_integrability;
    return j;
}

void write_manifest(const std::string& artifact_path, const RunConfig& c, double wall_seconds) {
    json m;
    m["artifact"] = fs::path(artifact_path).filename().string();
    m["tool"] = "reflectics 0.1.0";
    m["created_unix"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    m["wall_seconds"] = wall_seconds;
    m["seed"] = c.seed;
    m["workers"] = c.workers;
    m["format"] = c.format;
    m["config"] = config_echo(c);
    write_text_atomic(artifact_path + ".manifest.json", m.dump(2) + "\n");
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string ext(const RunConfig& c) { return c.format == "csv" ? ".csv" : ".jsonl"; }

// key/value report, one row per entry.
void write_report(const std::string& path, const RunConfig& c,
                  const std::vector<std::pair<std::string, std::string>>& rows,
                  const Stopwatch& watch) {
    std::string body;
    if (c.format == "csv") {
        body += "key,value\n";
        for (const auto& [k, v] : rows) body += make_csv_row({k, v}) + "\n";
    } else {
        for (const auto& [k, v] : rows) {
            json j;
            j["key"] = k;
            j["value"] = v;
            body += j.dump() + "\n";
        }
    }
    write_text_atomic(path, body);
    write_manifest(path, c, watch.seconds());
}

std::string vec_to_string(const Vec& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_double(v(i));
    }
    return s + "]";
}

void write_path_artifact(const std::string& path, const RunConfig& c, const PathRecord& rec,
                         const Stopwatch& watch) {
    std::string body;
    const Eigen::Index D = rec.states.cols();
    const Eigen::Index m = rec.local_times.cols();
    if (c.format == "csv") {
        std::vector<std::string> header = {"t"};
        for (Eigen::Index k = 0; k < D; ++k) header.push_back("x" + std::to_string(k));
        for (Eigen::Index i = 0; i < m; ++i)
            header.push_back("L:" + rec.constraint_ids[static_cast<size_t>(i)]);
        body += make_csv_row(header) + "\n";
        for (size_t r = 0; r < rec.times.size(); ++r) {
            std::vector<std::string> row = {format_double(rec.times[r])};
            for (Eigen::Index k = 0; k < D; ++k)
                row.push_back(format_double(rec.states(static_cast<Eigen::Index>(r), k)));
            for (Eigen::Index i = 0; i < m; ++i)
                row.push_back(format_double(rec.local_times(static_cast<Eigen::Index>(r), i)));
            body += make_csv_row(row) + "\n";
        }
    } else {
        for (size_t r = 0; r < rec.times.size(); ++r) {
            json j;
            j["t"] = rec.times[r];
            j["x"] = std::vector<double>(rec.states.row(static_cast<Eigen::Index>(r)).begin(),
                                         rec.states.row(static_cast<Eigen::Index>(r)).end());
            json L;
            for (Eigen::Index i = 0; i < m; ++i)
                L[rec.constraint_ids[static_cast<size_t>(i)]] =
                    rec.local_times(static_cast<Eigen::Index>(r), i);
            j["L"] = L;
            body += j.dump() + "\n";
        }
    }
    write_text_atomic(path, body);
    write_manifest(path, c, watch.seconds());
}

void write_samples_artifact(const std::string& path, const RunConfig& c,
                            const std::vector<Vec>& samples, const Stopwatch& watch) {
    std::string body;
    if (c.format == "csv") {
        const Eigen::Index D = samples.empty() ? 0 : samples.front().size();
        std::vector<std::string> header;
        for (Eigen::Index k = 0; k < D; ++k) header.push_back("x" + std::to_string(k));
        body += make_csv_row(header) + "\n";
        for (const Vec& s : samples) {
            std::vector<std::string> row;
            for (Eigen::Index k = 0; k < s.size(); ++k) row.push_back(format_double(s(k)));
            body += make_csv_row(row) + "\n";
        }
    } else {
        for (const Vec& s : samples) {
            json j;
            j["x"] = std::vector<double>(s.begin(), s.end());
            body += j.dump() + "\n";
        }
    }
    write_text_atomic(path, body);
    write_manifest(path, c, watch.seconds());
}

std::vector<std::pair<std::string, std::string>> compat_rows(const CompatReport& rep) {
    return {{"verdict", to_string(rep.verdict)},
            {"beta0_estimate", format_double(rep.beta0_estimate)},
            {"grad_floor_observed", format_double(rep.grad_floor_observed)},
            {"hessian_bound_declared", format_double(rep.hessian_bound_declared)},
            {"samples_checked", std::to_string(rep.samples_checked)},
            {"samples_failed", std::to_string(rep.samples_failed)},
            {"worst_point", vec_to_string(rep.worst_point)},
            {"box_lo", vec_to_string(rep.box_lo)},
            {"box_hi", vec_to_string(rep.box_hi)},
            {"note", rep.note}};
}

int run_check_compat(const RunConfig& c, const Stopwatch& watch) {
    ConstraintSet set = domain_constraints(c);
    Vec lo, hi;
    domain_box(c, lo, hi);
    BoundarySampler sampler(set, lo, hi, c.seed);
    CompatOptions opts;
    opts.refute_tol = c.refute_tol;
    const CompatReport rep = check_compatibility(set, sampler, c.n_boundary_samples, opts);
    write_report((fs::path(c.out_dir) / ("compat_report" + ext(c))).string(), c, compat_rows(rep),
                 watch);
    return rep.verdict == CompatVerdict::CertifiedAtSamples ? kExitOk : kExitModelInvalid;
}

int run_simulate(const RunConfig& c, const Stopwatch& watch, const std::string& name) {
    const DynamicsSpec spec = domain_dynamics(c);
    const Vec x0 = domain_start(c);
    const std::string path = (fs::path(c.out_dir) / (name + ext(c))).string();
    PathRecord rec;
    try {
        rec = simulate(spec, x0, c.T, c.dt, c.seed, 0, c.record_stride);
    } catch (const SimulationError& e) {
        write_path_artifact(path, c, e.partial_record, watch);
        return kExitNumericalFailure;
    }
    write_path_artifact(path, c, rec, watch);

    if (c.domain == "planet") {
        // Companion artifact: physical local times.
        const auto phys = planet::rescale_local_times(rec, planet_model_from(c));
        std::string body;
        if (c.format == "csv") {
            std::vector<std::string> header = {"t"};
            for (const auto& [k, v] : phys) {
                (void)v;
                header.push_back(k);
            }
            body += make_csv_row(header) + "\n";
            for (size_t r = 0; r < rec.times.size(); ++r) {
                std::vector<std::string> row = {format_double(rec.times[r])};
                for (const auto& [k, series] : phys) {
                    (void)k;
                    row.push_back(format_double(series[r]));
                }
                body += make_csv_row(row) + "\n";
            }
        } else {
            for (size_t r = 0; r < rec.times.size(); ++r) {
                json j;
                j["t"] = rec.times[r];
                for (const auto& [k, series] : phys) j[k] = series[r];
                body += j.dump() + "\n";
            }
        }
        const std::string lt_path = (fs::path(c.out_dir) / ("local_times" + ext(c))).string();
        write_text_atomic(lt_path, body);
        write_manifest(lt_path, c, watch.seconds());
    }
    return kExitOk;
}

int run_sample_gibbs(const RunConfig& c, const Stopwatch& watch) {
    if (c.domain == "planet" && !c.override_integrability) {
        const planet::PlanetModel m = planet_model_from(c);
        if (check_integrability(m.gravity, m.d, m.temperature, c.eta) !=
            IntegrabilityVerdict::Finite) {
            write_report((fs::path(c.out_dir) / ("gibbs_report" + ext(c))).string(), c,
                         {{"error", "integrability unknown at this temperature; rerun with "
                                    "override_integrability"}},
                         watch);
            return kExitModelInvalid;
        }
    }
    const GibbsSpec spec = domain_gibbs(c);
    Vec scale;
    if (c.proposal_scale > 0.0) {
        scale = Vec::Constant(spec.set.dimension(), c.proposal_scale);
    } else if (c.domain == "planet") {
        scale = planet::gibbs_proposal_scale(planet_model_from(c));
    } else {
        scale = 0.25 * (spec.envelope_hi - spec.envelope_lo);
    }
    const McmcResult res = sample_mcmc(spec, c.n_samples, c.burn_in, scale, c.seed, c.thin);
    write_samples_artifact((fs::path(c.out_dir) / ("samples" + ext(c))).string(), c, res.samples,
                           watch);
    write_report((fs::path(c.out_dir) / ("gibbs_report" + ext(c))).string(), c,
                 {{"acceptance_rate", format_double(res.acceptance_rate)},
                  {"burn_in_used", std::to_string(res.burn_in_used)},
                  {"n_samples", std::to_string(c.n_samples)},
                  {"thin", std::to_string(c.thin)}},
                 watch);
    return kExitOk;
}

int run_reversibility(const RunConfig& c, const Stopwatch& watch) {
    const DynamicsSpec spec = domain_dynamics(c);
    const GibbsSpec gspec = domain_gibbs(c);
    const int D = gspec.set.dimension();

    // Envelope cap for per-path i.i.d. equilibrium starts.
    double cap = gspec.log_density_cap;
    if (!std::isfinite(cap)) {
        cap = -std::numeric_limits<double>::infinity();
        RngStream probe(c.seed, 0x63617070ULL);
        for (int i = 0; i < 20000; ++i) {
            Vec x(D);
            for (int k = 0; k < D; ++k)
                x(k) = gspec.envelope_lo(k) + (gspec.envelope_hi(k) - gspec.envelope_lo(k)) * probe.u01();
            cap = std::max(cap, log_density(gspec, x));
        }
        require(std::isfinite(cap), "reversibility: no feasible point in the envelope");
        cap += 0.5;
    }
    auto initial_sampler = [&gspec, cap, seed = c.seed, D](uint64_t p) {
        RngStream rng(seed ^ 0x696E6974ULL, p + 1);
        for (long t = 0; t < 1000000; ++t) {
            Vec x(D);
            for (int k = 0; k < D; ++k)
                x(k) = gspec.envelope_lo(k) + (gspec.envelope_hi(k) - gspec.envelope_lo(k)) * rng.u01();
            const double lp = log_density(gspec, x);
            if (std::isfinite(lp) && std::log(rng.u01()) < lp - cap) return x;
        }
        throw std::runtime_error("reversibility: equilibrium start sampling failed");
    };

    // Fixed grid cells over the envelope box (first two coordinates).
    const int per_axis = 4;
    const int axes = std::min(2, D);
    const int n_cells = axes == 1 ? per_axis : per_axis * per_axis;
    const Vec lo = gspec.envelope_lo, hi = gspec.envelope_hi;
    auto cell_of = [lo, hi, axes, per_axis](const Vec& x) {
        int cell = 0;
        for (int a = 0; a < axes; ++a) {
            int idx = static_cast<int>(per_axis * (x(a) - lo(a)) / (hi(a) - lo(a)));
            idx = std::clamp(idx, 0, per_axis - 1);
            cell = cell * per_axis + idx;
        }
        return cell;
    };

    const ReversibilityReport rep = reversibility_test(spec, initial_sampler, cell_of, n_cells,
                                                       c.n_paths, c.T, c.dt, c.alpha, c.seed,
                                                       c.workers);
    write_report((fs::path(c.out_dir) / ("reversibility_report" + ext(c))).string(), c,
                 {{"conclusive", rep.conclusive ? "true" : "false"},
                  {"reversible", rep.reversible ? "true" : "false"},
                  {"stationary", rep.stationary ? "true" : "false"},
                  {"swap_statistic", format_double(rep.swap_statistic)},
                  {"swap_df", std::to_string(rep.swap_df)},
                  {"swap_pvalue", format_double(rep.swap_pvalue)},
                  {"stationarity_statistic", format_double(rep.stationarity_statistic)},
                  {"stationarity_df", std::to_string(rep.stationarity_df)},
                  {"stationarity_pvalue", format_double(rep.stationarity_pvalue)},
                  {"paths_used", std::to_string(rep.paths_used)}},
                 watch);
    if (!rep.conclusive) return kExitNumericalFailure;
    return (rep.reversible && rep.stationary) ? kExitOk : kExitStatisticalFail;
}

int run_planet(const RunConfig& c, const Stopwatch& watch) {
    RunConfig cc = c;
    cc.domain = "planet";

    if (c.planet_mode == "simulate") return run_simulate(cc, watch, "planet_path");

    if (c.planet_mode == "check-model") {
        const planet::PlanetModel m = planet_model_from(cc);
        m.validate();
        ConstraintSet set = planet::build_constraints(m);
        Vec lo, hi;
        domain_box(cc, lo, hi);
        BoundarySampler sampler(set, lo, hi, c.seed);
        CompatOptions opts;
        opts.refute_tol = c.refute_tol;
        const CompatReport rep = check_compatibility(set, sampler, c.n_boundary_samples, opts);
        auto rows = compat_rows(rep);
        const IntegrabilityVerdict iv = check_integrability(m.gravity, m.d, m.temperature, c.eta);
        rows.push_back({"integrability",
                        iv == IntegrabilityVerdict::Finite ? "finite" : "unknown"});
        write_report((fs::path(c.out_dir) / ("planet_model_report" + ext(c))).string(), cc, rows,
                     watch);
        return rep.verdict == CompatVerdict::CertifiedAtSamples ? kExitOk : kExitModelInvalid;
    }

    // clustering-curve
    planet::CurveOptions opts;
    opts.eta = c.eta;
    opts.override_integrability = c.override_integrability;
    opts.thin = c.thin;
    opts.workers = c.workers;
    std::vector<planet::CurvePoint> curve;
    try {
        curve = planet::clustering_curve(planet_model_from(cc), c.temperatures, c.eps, c.n_samples,
                                         c.seed, opts);
    } catch (const std::runtime_error& e) {
        write_report((fs::path(c.out_dir) / ("curve_report" + ext(c))).string(), cc,
                     {{"error", e.what()}}, watch);
        return kExitModelInvalid;
    }
    std::string body;
    const std::string path = (fs::path(c.out_dir) / ("clustering_curve" + ext(c))).string();
    if (c.format == "csv") {
        body += "tau,estimate,ci_low,ci_high,n_samples\n";
        for (const auto& p : curve)
            body += make_csv_row({format_double(p.tau), format_double(p.estimate),
                                  format_double(p.ci_low), format_double(p.ci_high),
                                  std::to_string(p.n_samples)}) +
                    "\n";
    } else {
        for (const auto& p : curve) {
            json j;
            j["tau"] = p.tau;
            j["estimate"] = p.estimate;
            j["ci_low"] = p.ci_low;
            j["ci_high"] = p.ci_high;
            j["n_samples"] = p.n_samples;
            body += j.dump() + "\n";
        }
    }
    write_text_atomic(path, body);
    write_manifest(path, cc, watch.seconds());
    return kExitOk;
}

}  // namespace

int run(const RunConfig& config) {
    const Stopwatch watch;
    try {
        config.validate();
        fs::create_directories(config.out_dir);
        if (config.subcommand == "check-compat") return run_check_compat(config, watch);
        if (config.subcommand == "simulate") return run_simulate(config, watch, "path");
        if (config.subcommand == "sample-gibbs") return run_sample_gibbs(config, watch);
        if (config.subcommand == "reversibility") return run_reversibility(config, watch);
        if (config.subcommand == "planet") return run_planet(config, watch);
        throw ConfigError("unknown subcommand '" + config.subcommand + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitParseError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "model invalid: %s\n", e.what());
        return kExitModelInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumericalFailure;
    }
}

}  // namespace reflectics
