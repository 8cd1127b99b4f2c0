#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bcp::stats {

struct IntervalEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// 95% Wilson score interval for a binomial proportion.
IntervalEstimate wilson_interval(int64_t successes, int64_t trials);

// Sample mean with 95% normal-approximation interval.
IntervalEstimate mean_interval(std::span<const double> values);

double binomial_stderr(double p, int64_t n);

// Survival function of the Kolmogorov distribution, Q(x) = P(K > x).
double kolmogorov_sf(double x);

// One-sample Kolmogorov-Smirnov tests; return the p-value of sup-norm
// distance between the empirical CDF and the reference.
double ks_test_exponential(std::span<const double> sample, double rate);
double ks_test_uniform(std::span<const double> sample, double lo, double hi);

}  // namespace bcp::stats
