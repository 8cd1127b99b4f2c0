#include "bcp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcp::stats {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

IntervalEstimate wilson_interval(int64_t successes, int64_t trials) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: need at least one trial");
    if (successes < 0 || successes > trials) throw std::invalid_argument("wilson_interval: bad success count");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {p, lo, hi};
}

IntervalEstimate mean_interval(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_interval: empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, mean - kZ95 * se, mean + kZ95 * se};
}

double binomial_stderr(double p, int64_t n) {
    if (n < 1) throw std::invalid_argument("binomial_stderr: need n >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

template <class Cdf>
double ks_pvalue(std::span<const double> sample, Cdf&& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks test: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return kolmogorov_sf(std::sqrt(n) * d);
}

}  // namespace

double ks_test_exponential(std::span<const double> sample, double rate) {
    if (rate <= 0.0) throw std::invalid_argument("ks_test_exponential: rate must be positive");
    return ks_pvalue(sample, [rate](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); });
}

double ks_test_uniform(std::span<const double> sample, double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("ks_test_uniform: need lo < hi");
    return ks_pvalue(sample, [lo, hi](double x) {
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        return (x - lo) / (hi - lo);
    });
}

}  // namespace bcp::stats
