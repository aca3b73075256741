#pragma once

#include <string>
#include <vector>

#include "reflectics/gibbs.hpp"
#include "reflectics/run_config.hpp"
#include "reflectics/sde.hpp"

namespace reflectics {

// Process exit codes shared by run() and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitModelInvalid = 3;
inline constexpr int kExitNumericalFailure = 4;
inline constexpr int kExitStatisticalFail = 5;

// Lossless decimal rendering (17 significant digits).
std::string format_double(double v);

// Minimal row codecs; every emitted row parses back through these.
std::vector<std::string> parse_csv_row(const std::string& line);
std::string make_csv_row(const std::vector<std::string>& fields);

// Writes content to path via a temp file in the same directory plus rename.
void write_text_atomic(const std::string& path, const std::string& content);

// Built-in domain registry ---------------------------------------------------

// Constraint set for config.domain with obliquity = config.obliquity * I.
ConstraintSet domain_constraints(const RunConfig& config);
// Potential of the configured phi family and its gradient.
double domain_phi(const RunConfig& config, const Vec& x);
Vec domain_phi_gradient(const RunConfig& config, const Vec& x);
// Langevin dynamics reversible for 1_D e^{-phi}: sigma = theta I, drift
// -1/2 theta^2 grad phi.
DynamicsSpec domain_dynamics(const RunConfig& config);
GibbsSpec domain_gibbs(const RunConfig& config);
// A strictly feasible starting point.
Vec domain_start(const RunConfig& config);

// Executes the configured run, writing every artifact (plus one manifest per
// artifact) under config.out_dir. Returns an exit code; does not throw for
// anticipated failures.
int run(const RunConfig& config);

}  // namespace reflectics
