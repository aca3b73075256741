#include "reflectics/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "reflectics/compat.hpp"
#include "reflectics/rng.hpp"
#include "reflectics/stats.hpp"

namespace reflectics {

double log_density(const GibbsSpec& spec, const Vec& x) {
    if (x.size() != spec.set.dimension()) return -std::numeric_limits<double>::infinity();
    for (const auto& c : spec.set.constraints())
        if (!(c.value(x) > 0.0)) return -std::numeric_limits<double>::infinity();
    return -spec.phi(x);
}

namespace {

Vec mcmc_start(const GibbsSpec& spec, uint64_t seed) {
    if (spec.start.size() == spec.set.dimension() &&
        std::isfinite(log_density(spec, spec.start)))
        return spec.start;
    return find_feasible_point(spec.set, spec.envelope_lo, spec.envelope_hi, seed ^ 0x6D636D63ULL);
}

struct Chain {
    Vec x;
    double logp;
    long accepted = 0;
    long proposed = 0;

    void advance(const GibbsSpec& spec, const Vec& scale, RngStream& rng) {
        Vec y;
        if (spec.extra_move && rng.u01() < spec.extra_move_prob) {
            y = spec.extra_move(x, rng);
        } else {
            y = x;
            for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += scale(k) * rng.normal();
        }
        const double lp = log_density(spec, y);
        ++proposed;
        // Symmetric proposal: accept with exp(min(0, logp(y) - logp(x))).
        if (lp > -std::numeric_limits<double>::infinity() &&
            std::log(rng.u01()) < lp - logp) {
            x = std::move(y);
            logp = lp;
            ++accepted;
        }
    }
};

}  // namespace

McmcResult sample_mcmc(const GibbsSpec& spec, long n, long burn_in, const Vec& proposal_scale,
                       uint64_t seed, long thin) {
    require(n > 0, "sample_mcmc: n must be positive");
    require(thin >= 1, "sample_mcmc: thin must be >= 1");
    require(proposal_scale.size() == spec.set.dimension() && proposal_scale.minCoeff() > 0.0,
            "sample_mcmc: bad proposal scale");

    RngStream rng(seed, 0x6D63686169ULL);
    Chain chain{mcmc_start(spec, seed), 0.0};
    chain.logp = log_density(spec, chain.x);
    require(std::isfinite(chain.logp), "sample_mcmc: no feasible starting point");

    if (burn_in < 0) {
        // Pilot run; burn 10x the integrated autocorrelation of phi.
        const long pilot = 2000;
        std::vector<double> series;
        series.reserve(static_cast<size_t>(pilot));
        for (long i = 0; i < pilot; ++i) {
            chain.advance(spec, proposal_scale, rng);
            series.push_back(chain.logp);
        }
        burn_in = static_cast<long>(std::ceil(10.0 * integrated_autocorrelation(series)));
    }

    for (long i = 0; i < burn_in; ++i) chain.advance(spec, proposal_scale, rng);

    McmcResult res;
    res.burn_in_used = burn_in;
    res.samples.reserve(static_cast<size_t>(n));
    chain.accepted = 0;
    chain.proposed = 0;
    for (long i = 0; i < n; ++i) {
        for (long t = 0; t < thin; ++t) chain.advance(spec, proposal_scale, rng);
        res.samples.push_back(chain.x);
    }
    res.acceptance_rate = static_cast<double>(chain.accepted) / static_cast<double>(chain.proposed);
    return res;
}

McmcResult sample_mcmc(const GibbsSpec& spec, long n, long burn_in, double proposal_scale,
                       uint64_t seed, long thin) {
    return sample_mcmc(spec, n, burn_in,
                       Vec(Vec::Constant(spec.set.dimension(), proposal_scale)), seed, thin);
}

std::vector<Vec> sample_rejection(const GibbsSpec& spec, long n, uint64_t seed) {
    require(n > 0, "sample_rejection: n must be positive");
    const int d = spec.set.dimension();
    require(spec.envelope_lo.size() == d && spec.envelope_hi.size() == d,
            "sample_rejection: envelope dimension mismatch");

    double cap = spec.log_density_cap;
    RngStream rng(seed, 0x72656A6563ULL);
    if (!std::isfinite(cap)) {
        // Probe the envelope for the density peak, with margin.
        cap = -std::numeric_limits<double>::infinity();
        RngStream probe_rng(seed, 0x70726F6265ULL);
        for (int probe = 0; probe < 20000; ++probe) {
            Vec x(d);
            for (int k = 0; k < d; ++k)
                x(k) = spec.envelope_lo(k) + (spec.envelope_hi(k) - spec.envelope_lo(k)) * probe_rng.u01();
            cap = std::max(cap, log_density(spec, x));
        }
        require(std::isfinite(cap), "sample_rejection: no feasible point found in envelope");
        cap += 0.5;
    }

    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(n));
    long proposals = 0;
    while (static_cast<long>(out.size()) < n) {
        ++proposals;
        if (proposals > 2000000 && static_cast<double>(out.size()) / static_cast<double>(proposals) < 1e-5)
            throw std::runtime_error(
                "sample_rejection: acceptance rate below floor; use a smaller instance or a "
                "tighter envelope");
        Vec x(d);
        for (int k = 0; k < d; ++k)
            x(k) = spec.envelope_lo(k) + (spec.envelope_hi(k) - spec.envelope_lo(k)) * rng.u01();
        const double lp = log_density(spec, x);
        if (lp == -std::numeric_limits<double>::infinity()) continue;
        if (lp > cap)
            throw std::runtime_error("sample_rejection: envelope density cap violated");
        if (std::log(rng.u01()) < lp - cap) out.push_back(std::move(x));
    }
    return out;
}

IntegrabilityVerdict check_integrability(const GravityTriple& gravity, int d, double tau,
                                         double eta, double probe_lo, double probe_hi) {
    require(d >= 1, "check_integrability: bad dimension");
    require(tau > 0.0, "check_integrability: tau must be positive");
    require(eta > 0.0 && probe_lo > 0.0 && probe_hi > probe_lo, "check_integrability: bad probe range");

    double ell = std::numeric_limits<double>::infinity();
    const int k = 64;
    for (int i = 0; i <= k; ++i) {
        const double rho = probe_lo * std::pow(probe_hi / probe_lo, static_cast<double>(i) / k);
        ell = std::min(ell, rho * gravity.deriv(rho));
    }
    if (!(ell > eta)) return IntegrabilityVerdict::Unknown;
    return ((ell - eta) / (tau * tau) > static_cast<double>(d)) ? IntegrabilityVerdict::Finite
                                                                : IntegrabilityVerdict::Unknown;
}

}  // namespace reflectics
