#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bcp/border_rule.hpp"
#include "bcp/configuration.hpp"
#include "bcp/stats.hpp"

namespace bcp {

// Point estimate with 95% interval and the full input echo needed to rerun it.
struct EstimateReport {
    std::string op;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int64_t replicas = 0;
    uint64_t seed = 0;
    std::map<std::string, double> params;
};

// schema_version-tagged JSON object (single line, deterministic key order).
std::string report_json(const EstimateReport& report);

// Flat CSV row: op,estimate,ci_low,ci_high,replicas,seed,params with params
// rendered as semicolon-joined key=value pairs.
std::string report_csv_header();
std::string report_csv_row(const EstimateReport& report);

// Histogram of edge-anchored occupancy patterns on sites [-depth, -1] at one
// sample time; the anchor site 0 is occupied by construction. Bit k of a
// pattern is the occupancy of site -(k+1).
struct EmpiricalEdgeMeasure {
    int64_t depth = 0;
    double sample_time = 0.0;
    int64_t replicas = 0;
    uint64_t seed = 0;
    std::map<uint32_t, int64_t> counts;

    void merge(const EmpiricalEdgeMeasure& other);
    std::string pattern_string(uint32_t bits) const;  // leftmost char = site -depth
};

// Total variation distance between two equal-depth pattern histograms.
double tv_distance(const EmpiricalEdgeMeasure& a, const EmpiricalEdgeMeasure& b);

// Normal-approximation standard error of the empirical TV distance.
double tv_stderr(const EmpiricalEdgeMeasure& a, const EmpiricalEdgeMeasure& b);

// "pattern,count" rows, patterns in deterministic order.
void write_measure_csv(const EmpiricalEdgeMeasure& measure, std::ostream& out);
std::string measure_json(const EmpiricalEdgeMeasure& measure);

// Fraction of runs from {0} still occupied at the horizon (a finite-horizon
// stand-in for survival forever; the horizon is echoed in params). Replica r
// uses the derived stream seed (seed, r); the window grows with the
// infection. Runs whose population reaches `alive_cap` are classified alive
// and stopped early.
EstimateReport estimate_theta(const BorderRule& rule, double horizon, int64_t replicas, uint64_t seed,
                              int workers = 0, int64_t alive_cap = 256);

// Same estimator confined to the clipped window {0,..,n_sites-1} from an
// occupancy bitmask; comparable against the exact transient analysis.
EstimateReport estimate_theta_clipped(const BorderRule& rule, int n_sites, uint32_t init_state,
                                      double horizon, int64_t replicas, uint64_t seed, int workers = 0);

struct EdgeSpeedReport {
    EstimateReport report;
    std::vector<double> per_replica;  // per-replica speeds, replica order
};

// Mean of (R(horizon) - R(burn_in)) / (horizon - burn_in) over anchored runs
// started from a fully occupied left-infinite configuration.
EdgeSpeedReport estimate_edge_speed(const BorderRule& rule, int64_t depth_w, double burn_in,
                                    double horizon, int64_t replicas, uint64_t seed, int workers = 0);

EmpiricalEdgeMeasure empirical_measure(const BorderRule& rule, const Configuration& init,
                                       int64_t depth_l, double sample_time, int64_t replicas,
                                       uint64_t seed, int64_t depth_w, int workers = 0);

// Fraction of shared-randomness replica pairs whose anchored patterns agree
// exactly on [-depth_l, 0] at the sample time.
EstimateReport agreement_probability(const BorderRule& rule, const Configuration& init_a,
                                     const Configuration& init_b, int64_t depth_l, double sample_time,
                                     int64_t replicas, uint64_t seed, int64_t depth_w, int workers = 0);

struct IncrementMomentsReport {
    EstimateReport mean_positive;  // mean of max(dR, 0) per unit time
    EstimateReport mean_negative;  // mean of max(-dR, 0)
    EstimateReport mean;
    int64_t increments_per_replica = 0;
};

// Unit-time right-edge increments after burn-in, anchored mode. Confidence
// intervals come from per-replica means, which are independent.
IncrementMomentsReport increment_moments(const BorderRule& rule, double burn_in,
                                         int64_t increments_per_replica, int64_t replicas,
                                         uint64_t seed, int64_t depth_w, int workers = 0);

// Fraction of anchored replicas with fewer than j occupied sites in [-i, 0]
// at the sample time.
EstimateReport aij_frequency(const BorderRule& rule, int64_t i, int64_t j, double sample_time,
                             int64_t replicas, uint64_t seed, int64_t depth_w, int workers = 0);

struct ProbeEvaluation {
    double rate = 0.0;  // the probed rate (lambda_e for the curve, lambda for calibration)
    EstimateReport report;
};

struct BracketResult {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<ProbeEvaluation> evaluations;
    bool monotone_within_ci = true;  // probe frequencies ordered in lambda_e up to CI slack

    double midpoint() const { return 0.5 * (lo + hi); }
};

// Bisection in lambda_e of the proxy "survival frequency at the horizon >=
// survival_threshold" at fixed lambda_i; returns a bracket of width <=
// tolerance. Throws if no bracket exists in [0, 2*lambda_i + 2].
BracketResult estimate_critical_lambda_e(double lambda_i, double horizon, int64_t replicas,
                                         double survival_threshold, double tolerance, uint64_t seed,
                                         int workers = 0);

struct CalibrationResult {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<ProbeEvaluation> evaluations;  // lambda -> survival-persistence ratio
    double horizon = 0.0;
    double ratio_threshold = 0.0;
    int64_t replicas = 0;
    uint64_t seed = 0;

    double lambda_hat() const { return 0.5 * (lo + hi); }
};

// Bracket for the classical critical rate. The probe statistic is the
// survival-persistence ratio P(alive at 2T) / P(alive at T); at the critical
// point the survival probability decays like t^-0.1595, so the ratio crosses
// 2^-0.1595 there, while it drops toward 0 below and rises toward 1 above.
CalibrationResult calibrate_lambda_c(double precision, double horizon, int64_t replicas,
                                     uint64_t seed, int workers = 0);

std::string calibration_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const std::string& text);

}  // namespace bcp
