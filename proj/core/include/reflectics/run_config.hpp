#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace reflectics {

// Raised on malformed or invalid configuration text; carries the offending
// line (0 when the problem is not tied to one line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_number(line) {}
    int line_number;
};

// Fully validated run plan. Parsed from key = value text; every key must be
// known and every tolerance positive. The seed is always explicit.
struct RunConfig {
    std::string subcommand;   // check-compat | simulate | sample-gibbs | reversibility | planet
    std::string planet_mode;  // simulate | clustering-curve | check-model

    // Built-in domain registry (non-planet subcommands).
    std::string domain = "quadrant";  // halfline | box | quadrant | wedge | annulus | planet
    int dim = 2;
    double box_lo = 0.0;
    double box_hi = 2.0;
    double wedge_angle_deg = 90.0;
    double annulus_inner = 1.0;
    double annulus_outer = 2.0;
    double obliquity = 1.0;  // scalar theta (identity multiple)

    std::string phi = "none";  // none | linear | quadratic | gravity_log
    double phi_coeff = 1.0;

    double dt = 1e-3;
    double T = 1.0;
    long n_samples = 1000;
    long burn_in = -1;  // negative -> automatic
    long thin = 1;
    int record_stride = 1;
    long n_paths = 1000;
    double alpha = 0.01;
    long n_boundary_samples = 1000;
    double refute_tol = 1e-6;
    double proposal_scale = 0.0;  // 0 -> subcommand default

    // Planet model.
    int planet_n = 2;
    int planet_d = 2;
    double planet_R = 1.0;
    double planet_r_minus = 0.1;
    double planet_r_plus = 0.2;
    double planet_elasticity = 1.0;
    double planet_temperature = 1.0;
    double planet_gravity_coeff = 3.0;
    std::vector<double> temperatures;  // clustering-curve sweep
    double eps = 0.2;
    double eta = 0.1;

    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "out";
    std::string format = "csv";  // csv | jsonl
    int workers = 1;
    bool override_integrability = false;

    // Cross-field invariants (tolerances positive, dt < T, ...); throws
    // ConfigError. Always enforced by parse_config.
    void validate_ranges() const;
    // validate_ranges plus the required fields (subcommand, explicit seed).
    // parse_config enforces it when the text names a subcommand; the CLI
    // enforces it after merging flag overrides.
    void validate() const;
};

// Parses key = value lines ('#' and ';' comments, blank lines ignored).
// Unknown keys, duplicate keys, bad types, and invariant violations are hard
// errors with a line number.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace reflectics
