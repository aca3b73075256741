#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace reflectics {

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi2_sf(double x, int df);

// One-sample Kolmogorov-Smirnov distance against a CDF. Sorts a copy.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample KS distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Wilson score interval for a binomial proportion.
struct BinomialCi {
    double estimate;
    double lo;
    double hi;
};
BinomialCi wilson_interval(long successes, long trials, double z = 1.959963984540054);

// Integrated autocorrelation time of a scalar series (initial positive
// sequence estimator); at least 1.
double integrated_autocorrelation(const std::vector<double>& series);

// Total variation distance between two histograms (normalized internally).
double tv_distance(const std::vector<long>& a, const std::vector<long>& b);

}  // namespace reflectics
