#include "reflectics/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace reflectics {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Entry {
    std::string value;
    int line;
};

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const size_t hash = raw.find_first_of("#;");
            std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (s.empty()) continue;
            const size_t eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("expected key = value", line);
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty()) throw ConfigError("empty key", line);
            if (entries_.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
            entries_[key] = {val, line};
        }
    }

    bool has(const std::string& key) {
        consumed_.insert(key);
        return entries_.count(key) != 0;
    }

    std::string str(const std::string& key, const std::string& def) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        return it == entries_.end() ? def : it->second.value;
    }

    double num(const std::string& key, double def) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return def;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected a number, got '" + it->second.value + "'",
                              it->second.line);
        }
    }

    long integer(const std::string& key, long def) {
        const double v = num(key, static_cast<double>(def));
        if (v != std::floor(v)) {
            auto it = entries_.find(key);
            throw ConfigError("key '" + key + "': expected an integer", it->second.line);
        }
        return static_cast<long>(v);
    }

    bool boolean(const std::string& key, bool def) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return def;
        const std::string& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key '" + key + "': expected a boolean", it->second.line);
    }

    std::vector<double> num_list(const std::string& key) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        std::vector<double> out;
        if (it == entries_.end()) return out;
        std::istringstream in(it->second.value);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                size_t pos = 0;
                out.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ConfigError("key '" + key + "': bad list element '" + tok + "'",
                                  it->second.line);
            }
        }
        return out;
    }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : entries_) {
            if (!consumed_.count(key))
                throw ConfigError("unknown key '" + key + "'", entry.line);
        }
    }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> consumed_;
};

}  // namespace

void RunConfig::validate_ranges() const {
    static const std::set<std::string> domains = {"halfline", "box", "quadrant", "wedge",
                                                 "annulus", "planet"};
    if (!domains.count(domain)) throw ConfigError("unknown domain '" + domain + "'");
    static const std::set<std::string> phis = {"none", "linear", "quadratic", "gravity_log"};
    if (!phis.count(phi)) throw ConfigError("unknown phi family '" + phi + "'");
    if (format != "csv" && format != "jsonl") throw ConfigError("format must be csv or jsonl");

    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (!(dt < T)) throw ConfigError("dt must be smaller than T");
    if (n_samples <= 0) throw ConfigError("n_samples must be positive");
    if (thin <= 0) throw ConfigError("thin must be positive");
    if (record_stride <= 0) throw ConfigError("record_stride must be positive");
    if (n_paths <= 0) throw ConfigError("n_paths must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (n_boundary_samples <= 0) throw ConfigError("n_boundary_samples must be positive");
    if (!(refute_tol > 0.0)) throw ConfigError("refute_tol must be positive");
    if (proposal_scale < 0.0) throw ConfigError("proposal_scale must be nonnegative");
    if (workers <= 0) throw ConfigError("workers must be positive");
    if (dim <= 0) throw ConfigError("dim must be positive");
    if (!(box_lo < box_hi)) throw ConfigError("need box_lo < box_hi");
    if (!(wedge_angle_deg > 0.0 && wedge_angle_deg < 180.0))
        throw ConfigError("wedge_angle_deg must lie in (0, 180)");
    if (!(annulus_inner > 0.0 && annulus_inner < annulus_outer))
        throw ConfigError("need 0 < annulus_inner < annulus_outer");
    if (!(obliquity > 0.0)) throw ConfigError("obliquity must be positive");

    if (planet_n <= 0 || planet_d <= 0) throw ConfigError("planet_n and planet_d must be positive");
    if (!(planet_R > 0.0)) throw ConfigError("planet_R must be positive");
    if (!(planet_r_minus > 0.0 && planet_r_minus < planet_r_plus))
        throw ConfigError("need 0 < planet_r_minus < planet_r_plus");
    if (!(planet_elasticity > 0.0)) throw ConfigError("planet_elasticity must be positive");
    if (!(planet_temperature > 0.0)) throw ConfigError("planet_temperature must be positive");
    if (!(planet_gravity_coeff > 0.0)) throw ConfigError("planet_gravity_coeff must be positive");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    for (double t : temperatures)
        if (!(t > 0.0)) throw ConfigError("temperatures must all be positive");
    if (subcommand == "planet" && planet_mode == "clustering-curve" && temperatures.empty())
        throw ConfigError("clustering-curve needs a temperatures list");
}

void RunConfig::validate() const {
    validate_ranges();
    static const std::set<std::string> subs = {"check-compat", "simulate", "sample-gibbs",
                                              "reversibility", "planet"};
    if (!subs.count(subcommand))
        throw ConfigError("subcommand must be one of check-compat, simulate, sample-gibbs, "
                          "reversibility, planet (got '" + subcommand + "')");
    if (subcommand == "planet") {
        static const std::set<std::string> modes = {"simulate", "clustering-curve", "check-model"};
        if (!modes.count(planet_mode))
            throw ConfigError("planet_mode must be simulate, clustering-curve, or check-model");
    }
    if (!seed_set) throw ConfigError("seed is required (no wall-clock default)");
}

RunConfig parse_config(const std::string& text) {
    Reader r(text);
    RunConfig c;

    c.subcommand = r.str("subcommand", "");
    c.planet_mode = r.str("planet_mode", "simulate");

    c.domain = r.str("domain", c.domain);
    c.dim = static_cast<int>(r.integer("dim", c.dim));
    c.box_lo = r.num("box_lo", c.box_lo);
    c.box_hi = r.num("box_hi", c.box_hi);
    c.wedge_angle_deg = r.num("wedge_angle_deg", c.wedge_angle_deg);
    c.annulus_inner = r.num("annulus_inner", c.annulus_inner);
    c.annulus_outer = r.num("annulus_outer", c.annulus_outer);
    c.obliquity = r.num("obliquity", c.obliquity);

    c.phi = r.str("phi", c.phi);
    c.phi_coeff = r.num("phi_coeff", c.phi_coeff);

    c.dt = r.num("dt", c.dt);
    c.T = r.num("T", c.T);
    c.n_samples = r.integer("n_samples", c.n_samples);
    c.burn_in = r.integer("burn_in", c.burn_in);
    c.thin = r.integer("thin", c.thin);
    c.record_stride = static_cast<int>(r.integer("record_stride", c.record_stride));
    c.n_paths = r.integer("n_paths", c.n_paths);
    c.alpha = r.num("alpha", c.alpha);
    c.n_boundary_samples = r.integer("n_boundary_samples", c.n_boundary_samples);
    c.refute_tol = r.num("refute_tol", c.refute_tol);
    c.proposal_scale = r.num("proposal_scale", c.proposal_scale);

    c.planet_n = static_cast<int>(r.integer("planet_n", c.planet_n));
    c.planet_d = static_cast<int>(r.integer("planet_d", c.planet_d));
    c.planet_R = r.num("planet_R", c.planet_R);
    c.planet_r_minus = r.num("planet_r_minus", c.planet_r_minus);
    c.planet_r_plus = r.num("planet_r_plus", c.planet_r_plus);
    c.planet_elasticity = r.num("planet_elasticity", c.planet_elasticity);
    c.planet_temperature = r.num("planet_temperature", c.planet_temperature);
    c.planet_gravity_coeff = r.num("planet_gravity_coeff", c.planet_gravity_coeff);
    c.temperatures = r.num_list("temperatures");
    c.eps = r.num("eps", c.eps);
    c.eta = r.num("eta", c.eta);

    if (r.has("seed")) {
        const std::string s = r.str("seed", "");
        try {
            size_t pos = 0;
            c.seed = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("");
            c.seed_set = true;
        } catch (const std::exception&) {
            throw ConfigError("key 'seed': expected an unsigned 64-bit integer", r.line_of("seed"));
        }
    }
    c.out_dir = r.str("out", c.out_dir);
    c.format = r.str("format", c.format);
    c.workers = static_cast<int>(r.integer("workers", c.workers));
    c.override_integrability = r.boolean("override_integrability", c.override_integrability);

    r.reject_unknown();
    c.validate_ranges();
    if (!c.subcommand.empty()) c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace reflectics
