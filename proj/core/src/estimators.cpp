#include "bcp/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "bcp/detail/replay.hpp"
#include "bcp/parallel.hpp"
#include "bcp/philox.hpp"

namespace bcp {

namespace {

using json = nlohmann::ordered_json;

void echo_rule(std::map<std::string, double>& params, const BorderRule& rule) {
    params["rate_interior"] = rule.interior;
    params["rate_left_out"] = rule.left_edge_out;
    params["rate_left_in"] = rule.left_edge_in;
    params["rate_right_out"] = rule.right_edge_out;
    params["rate_right_in"] = rule.right_edge_in;
}

void echo_init(std::map<std::string, double>& params, const char* prefix, const Configuration& init) {
    params[std::string(prefix) + "_window_lo"] = static_cast<double>(init.window.lo);
    params[std::string(prefix) + "_window_hi"] = static_cast<double>(init.window.hi);
    params[std::string(prefix) + "_occupied"] = static_cast<double>(init.occupied.size());
}

EstimateReport proportion_report(std::string op, int64_t hits, int64_t replicas, uint64_t seed) {
    const auto ci = stats::wilson_interval(hits, replicas);
    EstimateReport r;
    r.op = std::move(op);
    r.estimate = ci.estimate;
    r.ci_low = ci.ci_low;
    r.ci_high = ci.ci_high;
    r.replicas = replicas;
    r.seed = seed;
    return r;
}

EstimateReport mean_report(std::string op, std::span<const double> values, uint64_t seed) {
    const auto ci = stats::mean_interval(values);
    EstimateReport r;
    r.op = std::move(op);
    r.estimate = ci.estimate;
    r.ci_low = ci.ci_low;
    r.ci_high = ci.ci_high;
    r.replicas = static_cast<int64_t>(values.size());
    r.seed = seed;
    return r;
}

// Tracks extinction and an optional sure-alive population cap.
class SurvivalProbe {
public:
    explicit SurvivalProbe(int64_t alive_cap) : cap_(alive_cap) {}

    void advance_to(double, const detail::FiniteState&) {}
    void on_jump(double, int64_t, bool birth, const detail::FiniteState& s) {
        if (birth && cap_ > 0 && s.count() >= cap_) capped_ = true;
    }
    void on_extinct(double t, const detail::FiniteState&) { extinct_time_ = t; }
    bool done() const { return capped_ || extinct_time_ >= 0.0; }

    bool alive_at(double t) const { return extinct_time_ < 0.0 || extinct_time_ > t; }

private:
    int64_t cap_;
    bool capped_ = false;
    double extinct_time_ = -1.0;
};

bool run_survival_replica(const BorderRule& rule, double horizon, uint64_t replica_seed,
                          int64_t alive_cap) {
    detail::FiniteRunConfig cfg;
    cfg.rule = &rule;
    cfg.horizon = horizon;
    detail::StreamedMarks marks(replica_seed, rule.max_rate(), horizon);
    SurvivalProbe obs(alive_cap);
    const int64_t origin[] = {0};
    detail::run_finite(marks, cfg, origin, obs);
    return obs.alive_at(horizon);
}

// Right-edge values at the requested times, anchored mode.
class EdgeAtTimes {
public:
    explicit EdgeAtTimes(std::span<const double> times) : times_(times) {}

    void advance_to(double t, const detail::AnchoredState& s) {
        while (next_ < times_.size() && times_[next_] < t) {
            values_.push_back(s.right_edge());
            ++next_;
        }
    }
    void on_jump(double, int64_t, bool, const detail::AnchoredState&) {}
    bool done() const { return next_ >= times_.size(); }

    std::span<const int64_t> values() const { return values_; }

private:
    std::span<const double> times_;
    size_t next_ = 0;
    std::vector<int64_t> values_;
};

class PatternAtTime {
public:
    PatternAtTime(double time, int64_t depth) : time_(time), depth_(depth) {}

    void advance_to(double t, const detail::AnchoredState& s) {
        if (!captured_ && time_ < t) {
            pattern_ = s.pattern_bits(depth_);
            captured_ = true;
        }
    }
    void on_jump(double, int64_t, bool, const detail::AnchoredState&) {}
    bool done() const { return captured_; }

    uint32_t pattern() const { return pattern_; }

private:
    double time_;
    int64_t depth_;
    bool captured_ = false;
    uint32_t pattern_ = 0;
};

uint32_t anchored_pattern_at(const BorderRule& rule, const Configuration& init, int64_t depth_w,
                             int64_t depth_l, double sample_time, uint64_t replica_seed) {
    detail::AnchoredEngine engine(rule, rule.max_rate(), replica_seed, depth_w, sample_time);
    engine.reset(init);
    PatternAtTime obs(sample_time, depth_l);
    engine.run(obs);
    return obs.pattern();
}

}  // namespace

EstimateReport estimate_theta(const BorderRule& rule, double horizon, int64_t replicas, uint64_t seed,
                              int workers, int64_t alive_cap) {
    if (!(horizon > 0.0)) throw std::invalid_argument("estimate_theta: horizon must be positive");
    if (replicas < 1) throw std::invalid_argument("estimate_theta: need replicas >= 1");

    std::vector<uint8_t> alive(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        alive[static_cast<size_t>(r)] =
            run_survival_replica(rule, horizon, derive_seed(seed, static_cast<uint64_t>(r)), alive_cap) ? 1 : 0;
    });
    int64_t hits = 0;
    for (uint8_t a : alive) hits += a;

    auto report = proportion_report("estimate_theta", hits, replicas, seed);
    echo_rule(report.params, rule);
    report.params["horizon"] = horizon;
    report.params["alive_cap"] = static_cast<double>(alive_cap);
    return report;
}

EstimateReport estimate_theta_clipped(const BorderRule& rule, int n_sites, uint32_t init_state,
                                      double horizon, int64_t replicas, uint64_t seed, int workers) {
    if (n_sites < 1 || n_sites > 30) throw std::invalid_argument("estimate_theta_clipped: bad n_sites");
    if (init_state == 0 || init_state >= (1u << n_sites))
        throw std::invalid_argument("estimate_theta_clipped: bad initial state");
    if (!(horizon > 0.0)) throw std::invalid_argument("estimate_theta_clipped: horizon must be positive");
    if (replicas < 1) throw std::invalid_argument("estimate_theta_clipped: need replicas >= 1");

    std::vector<int64_t> init;
    for (int x = 0; x < n_sites; ++x)
        if (init_state & (1u << x)) init.push_back(x);

    std::vector<uint8_t> alive(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        detail::FiniteRunConfig cfg;
        cfg.rule = &rule;
        cfg.horizon = horizon;
        cfg.clip = Interval{0, n_sites - 1};
        detail::StreamedMarks marks(derive_seed(seed, static_cast<uint64_t>(r)), rule.max_rate(), horizon);
        SurvivalProbe obs(0);  // no cap: the window is already bounded
        detail::run_finite(marks, cfg, init, obs);
        alive[static_cast<size_t>(r)] = obs.alive_at(horizon) ? 1 : 0;
    });
    int64_t hits = 0;
    for (uint8_t a : alive) hits += a;

    auto report = proportion_report("estimate_theta_clipped", hits, replicas, seed);
    echo_rule(report.params, rule);
    report.params["horizon"] = horizon;
    report.params["n_sites"] = n_sites;
    report.params["init_state"] = init_state;
    return report;
}

EdgeSpeedReport estimate_edge_speed(const BorderRule& rule, int64_t depth_w, double burn_in,
                                    double horizon, int64_t replicas, uint64_t seed, int workers) {
    if (!(horizon > burn_in) || burn_in < 0.0)
        throw std::invalid_argument("estimate_edge_speed: need horizon > burn_in >= 0");
    if (replicas < 1) throw std::invalid_argument("estimate_edge_speed: need replicas >= 1");

    const Configuration init = Configuration::all_left_of(0, depth_w);
    const double times[] = {burn_in, horizon};

    std::vector<double> speeds(static_cast<size_t>(replicas), 0.0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        detail::AnchoredEngine engine(rule, rule.max_rate(), derive_seed(seed, static_cast<uint64_t>(r)),
                                      depth_w, horizon);
        engine.reset(init);
        EdgeAtTimes obs(times);
        engine.run(obs);
        speeds[static_cast<size_t>(r)] =
            static_cast<double>(obs.values()[1] - obs.values()[0]) / (horizon - burn_in);
    });

    EdgeSpeedReport out;
    out.report = mean_report("estimate_edge_speed", speeds, seed);
    echo_rule(out.report.params, rule);
    out.report.params["depth_w"] = static_cast<double>(depth_w);
    out.report.params["burn_in"] = burn_in;
    out.report.params["horizon"] = horizon;
    out.per_replica = std::move(speeds);
    return out;
}

EmpiricalEdgeMeasure empirical_measure(const BorderRule& rule, const Configuration& init,
                                       int64_t depth_l, double sample_time, int64_t replicas,
                                       uint64_t seed, int64_t depth_w, int workers) {
    if (depth_l < 1 || depth_l > 30) throw std::invalid_argument("empirical_measure: bad depth_l");
    if (depth_l > depth_w) throw std::invalid_argument("empirical_measure: depth_l exceeds window depth");
    if (replicas < 1) throw std::invalid_argument("empirical_measure: need replicas >= 1");

    std::vector<uint32_t> patterns(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        patterns[static_cast<size_t>(r)] = anchored_pattern_at(
            rule, init, depth_w, depth_l, sample_time, derive_seed(seed, static_cast<uint64_t>(r)));
    });

    EmpiricalEdgeMeasure m;
    m.depth = depth_l;
    m.sample_time = sample_time;
    m.replicas = replicas;
    m.seed = seed;
    for (uint32_t p : patterns) ++m.counts[p];
    return m;
}

EstimateReport agreement_probability(const BorderRule& rule, const Configuration& init_a,
                                     const Configuration& init_b, int64_t depth_l, double sample_time,
                                     int64_t replicas, uint64_t seed, int64_t depth_w, int workers) {
    if (depth_l < 1 || depth_l > depth_w) throw std::invalid_argument("agreement_probability: bad depth_l");
    if (replicas < 1) throw std::invalid_argument("agreement_probability: need replicas >= 1");

    std::vector<uint8_t> agree(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        const uint64_t shared = derive_seed(seed, static_cast<uint64_t>(r));
        const uint32_t pa = anchored_pattern_at(rule, init_a, depth_w, depth_l, sample_time, shared);
        const uint32_t pb = anchored_pattern_at(rule, init_b, depth_w, depth_l, sample_time, shared);
        agree[static_cast<size_t>(r)] = pa == pb ? 1 : 0;
    });
    int64_t hits = 0;
    for (uint8_t a : agree) hits += a;

    auto report = proportion_report("agreement_probability", hits, replicas, seed);
    echo_rule(report.params, rule);
    echo_init(report.params, "init_a", init_a);
    echo_init(report.params, "init_b", init_b);
    report.params["depth_l"] = static_cast<double>(depth_l);
    report.params["depth_w"] = static_cast<double>(depth_w);
    report.params["sample_time"] = sample_time;
    return report;
}

IncrementMomentsReport increment_moments(const BorderRule& rule, double burn_in,
                                         int64_t increments_per_replica, int64_t replicas,
                                         uint64_t seed, int64_t depth_w, int workers) {
    if (increments_per_replica < 1) throw std::invalid_argument("increment_moments: need increments >= 1");
    if (replicas < 1) throw std::invalid_argument("increment_moments: need replicas >= 1");
    if (burn_in < 0.0) throw std::invalid_argument("increment_moments: negative burn_in");

    std::vector<double> grid(static_cast<size_t>(increments_per_replica) + 1);
    for (size_t k = 0; k < grid.size(); ++k) grid[k] = burn_in + static_cast<double>(k);
    const double horizon = grid.back();
    const Configuration init = Configuration::all_left_of(0, depth_w);

    std::vector<double> pos(static_cast<size_t>(replicas)), neg(static_cast<size_t>(replicas)),
        mean(static_cast<size_t>(replicas));
    for_each_replica(replicas, workers, [&](int64_t r) {
        detail::AnchoredEngine engine(rule, rule.max_rate(), derive_seed(seed, static_cast<uint64_t>(r)),
                                      depth_w, horizon);
        engine.reset(init);
        EdgeAtTimes obs(grid);
        engine.run(obs);
        const auto edges = obs.values();
        double sp = 0.0, sn = 0.0, sm = 0.0;
        for (size_t k = 0; k + 1 < edges.size(); ++k) {
            const double d = static_cast<double>(edges[k + 1] - edges[k]);
            sp += std::max(d, 0.0);
            sn += std::max(-d, 0.0);
            sm += d;
        }
        const double n = static_cast<double>(increments_per_replica);
        pos[static_cast<size_t>(r)] = sp / n;
        neg[static_cast<size_t>(r)] = sn / n;
        mean[static_cast<size_t>(r)] = sm / n;
    });

    IncrementMomentsReport out;
    out.mean_positive = mean_report("increment_moments.positive", pos, seed);
    out.mean_negative = mean_report("increment_moments.negative", neg, seed);
    out.mean = mean_report("increment_moments.mean", mean, seed);
    out.increments_per_replica = increments_per_replica;
    for (auto* rep : {&out.mean_positive, &out.mean_negative, &out.mean}) {
        echo_rule(rep->params, rule);
        rep->params["burn_in"] = burn_in;
        rep->params["increments_per_replica"] = static_cast<double>(increments_per_replica);
        rep->params["depth_w"] = static_cast<double>(depth_w);
    }
    return out;
}

EstimateReport aij_frequency(const BorderRule& rule, int64_t i, int64_t j, double sample_time,
                             int64_t replicas, uint64_t seed, int64_t depth_w, int workers) {
    if (i < 0 || i >= depth_w) throw std::invalid_argument("aij_frequency: need 0 <= i < depth_w");
    if (i > 30) throw std::invalid_argument("aij_frequency: i too large");
    if (replicas < 1) throw std::invalid_argument("aij_frequency: need replicas >= 1");

    const Configuration init = Configuration::all_left_of(0, depth_w);
    std::vector<uint8_t> hit(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        const uint32_t bits = anchored_pattern_at(rule, init, depth_w, i, sample_time,
                                                  derive_seed(seed, static_cast<uint64_t>(r)));
        const int64_t occupied = 1 + std::popcount(bits);  // site 0 plus [-i, -1]
        hit[static_cast<size_t>(r)] = occupied < j ? 1 : 0;
    });
    int64_t hits = 0;
    for (uint8_t h : hit) hits += h;

    auto report = proportion_report("aij_frequency", hits, replicas, seed);
    echo_rule(report.params, rule);
    report.params["i"] = static_cast<double>(i);
    report.params["j"] = static_cast<double>(j);
    report.params["sample_time"] = sample_time;
    report.params["depth_w"] = static_cast<double>(depth_w);
    return report;
}

namespace {

bool probes_monotone_within_ci(std::vector<ProbeEvaluation> evals) {
    std::sort(evals.begin(), evals.end(),
              [](const ProbeEvaluation& a, const ProbeEvaluation& b) { return a.rate < b.rate; });
    for (size_t k = 0; k + 1 < evals.size(); ++k) {
        const auto& low = evals[k].report;
        const auto& high = evals[k + 1].report;
        if (low.estimate > high.estimate && low.ci_low > high.ci_high) return false;
    }
    return true;
}

}  // namespace

BracketResult estimate_critical_lambda_e(double lambda_i, double horizon, int64_t replicas,
                                         double survival_threshold, double tolerance, uint64_t seed,
                                         int workers) {
    if (!(lambda_i > 0.0)) throw std::invalid_argument("estimate_critical_lambda_e: lambda_i must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("estimate_critical_lambda_e: tolerance must be positive");
    if (survival_threshold < 0.0)
        throw std::invalid_argument("estimate_critical_lambda_e: negative threshold");

    BracketResult result;
    uint64_t probe_index = 0;
    auto probe = [&](double lambda_e) {
        auto report = estimate_theta(BorderRule::standard(lambda_i, lambda_e), horizon, replicas,
                                     derive_seed(seed, probe_index++, 0xC0), workers);
        report.params["lambda_e"] = lambda_e;
        result.evaluations.push_back({lambda_e, report});
        return report.estimate;
    };

    double lo = 0.0;
    if (probe(lo) >= survival_threshold) {
        result.lo = result.hi = 0.0;
        result.monotone_within_ci = true;
        return result;
    }
    double hi = 2.0 * lambda_i + 2.0;
    if (probe(hi) < survival_threshold)
        throw std::runtime_error("estimate_critical_lambda_e: no bracket in [0, 2*lambda_i + 2]");

    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) >= survival_threshold)
            hi = mid;
        else
            lo = mid;
    }
    result.lo = lo;
    result.hi = hi;
    result.monotone_within_ci = probes_monotone_within_ci(result.evaluations);
    return result;
}

namespace {

struct RatioProbe {
    EstimateReport report;
    double ratio = 0.0;
};

// Fraction of runs alive at 2T among those alive at T. Survival past T and
// continuation to 2T are conditionally independent across replicas, so the
// Wilson interval on (alive_2t | alive_t) applies.
RatioProbe survival_ratio_probe(double lambda, double horizon, int64_t replicas, uint64_t seed,
                                int workers, int64_t alive_cap) {
    const BorderRule rule = BorderRule::classical(lambda);
    const double t2 = 2.0 * horizon;
    std::vector<uint8_t> status(static_cast<size_t>(replicas), 0);
    for_each_replica(replicas, workers, [&](int64_t r) {
        detail::FiniteRunConfig cfg;
        cfg.rule = &rule;
        cfg.horizon = t2;
        detail::StreamedMarks marks(derive_seed(seed, static_cast<uint64_t>(r)), rule.max_rate(), t2);
        SurvivalProbe obs(alive_cap);
        const int64_t origin[] = {0};
        detail::run_finite(marks, cfg, origin, obs);
        status[static_cast<size_t>(r)] =
            static_cast<uint8_t>((obs.alive_at(horizon) ? 1 : 0) | (obs.alive_at(t2) ? 2 : 0));
    });

    int64_t alive_t = 0, alive_2t = 0;
    for (uint8_t s : status) {
        alive_t += s & 1;
        alive_2t += (s >> 1) & 1;
    }

    RatioProbe out;
    if (alive_t == 0) {
        out.report = EstimateReport{"calibrate_lambda_c.ratio", 0.0, 0.0, 1.0, 0, seed, {}};
        out.ratio = 0.0;
    } else {
        out.report = proportion_report("calibrate_lambda_c.ratio", alive_2t, alive_t, seed);
        out.ratio = out.report.estimate;
    }
    out.report.params["lambda"] = lambda;
    out.report.params["horizon"] = horizon;
    out.report.params["launched"] = static_cast<double>(replicas);
    return out;
}

}  // namespace

CalibrationResult calibrate_lambda_c(double precision, double horizon, int64_t replicas,
                                     uint64_t seed, int workers) {
    if (!(precision > 0.0)) throw std::invalid_argument("calibrate_lambda_c: precision must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("calibrate_lambda_c: horizon must be positive");
    if (replicas < 1) throw std::invalid_argument("calibrate_lambda_c: need replicas >= 1");

    // At the critical rate the single-site survival probability decays like
    // t^-delta with delta ~= 0.1595, so P(alive at 2T)/P(alive at T) tends to
    // 2^-delta; below it the ratio collapses, above it approaches 1.
    constexpr double kDelta = 0.1595;
    const double threshold = std::pow(2.0, -kDelta);

    CalibrationResult result;
    result.horizon = horizon;
    result.ratio_threshold = threshold;
    result.replicas = replicas;
    result.seed = seed;

    // Reaching 128 occupied sites within desk horizons only happens under
    // clearly supercritical growth, where dying afterwards has vanishing
    // probability; near-critical clusters stay far below the cap.
    uint64_t probe_index = 0;
    auto probe = [&](double lambda) {
        auto p = survival_ratio_probe(lambda, horizon, replicas, derive_seed(seed, probe_index++, 0xCA),
                                      workers, 128);
        result.evaluations.push_back({lambda, p.report});
        return p.ratio;
    };

    double lo = 1.0, hi = 2.0;
    while (probe(lo) >= threshold) {
        hi = lo;
        lo *= 0.5;
        if (lo < 0.05) throw std::runtime_error("calibrate_lambda_c: no subcritical bracket end");
    }
    while (probe(hi) < threshold) {
        lo = hi;
        hi *= 2.0;
        if (hi > 16.0) throw std::runtime_error("calibrate_lambda_c: no supercritical bracket end");
    }
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    result.lo = lo;
    result.hi = hi;
    return result;
}

void EmpiricalEdgeMeasure::merge(const EmpiricalEdgeMeasure& other) {
    if (other.depth != depth) throw std::invalid_argument("EmpiricalEdgeMeasure::merge: depth mismatch");
    for (const auto& [pattern, count] : other.counts) counts[pattern] += count;
    replicas += other.replicas;
}

std::string EmpiricalEdgeMeasure::pattern_string(uint32_t bits) const {
    std::string s(static_cast<size_t>(depth), '0');
    for (int64_t k = 0; k < depth; ++k)
        if (bits & (1u << k)) s[static_cast<size_t>(depth - 1 - k)] = '1';
    return s;
}

double tv_distance(const EmpiricalEdgeMeasure& a, const EmpiricalEdgeMeasure& b) {
    if (a.depth != b.depth) throw std::invalid_argument("tv_distance: depth mismatch");
    if (a.replicas < 1 || b.replicas < 1) throw std::invalid_argument("tv_distance: empty measure");
    double sum = 0.0;
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    const double na = static_cast<double>(a.replicas), nb = static_cast<double>(b.replicas);
    while (ia != a.counts.end() || ib != b.counts.end()) {
        double pa = 0.0, pb = 0.0;
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            pa = static_cast<double>((ia++)->second) / na;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            pb = static_cast<double>((ib++)->second) / nb;
        } else {
            pa = static_cast<double>((ia++)->second) / na;
            pb = static_cast<double>((ib++)->second) / nb;
        }
        sum += std::abs(pa - pb);
    }
    return 0.5 * sum;
}

double tv_stderr(const EmpiricalEdgeMeasure& a, const EmpiricalEdgeMeasure& b) {
    if (a.depth != b.depth) throw std::invalid_argument("tv_stderr: depth mismatch");
    const double na = static_cast<double>(a.replicas), nb = static_cast<double>(b.replicas);
    double var = 0.0;
    auto add = [&](double pa, double pb) { var += pa * (1.0 - pa) / na + pb * (1.0 - pb) / nb; };
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    while (ia != a.counts.end() || ib != b.counts.end()) {
        double pa = 0.0, pb = 0.0;
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            pa = static_cast<double>((ia++)->second) / na;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            pb = static_cast<double>((ib++)->second) / nb;
        } else {
            pa = static_cast<double>((ia++)->second) / na;
            pb = static_cast<double>((ib++)->second) / nb;
        }
        add(pa, pb);
    }
    return 0.5 * std::sqrt(var);
}

void write_measure_csv(const EmpiricalEdgeMeasure& measure, std::ostream& out) {
    out << "pattern,count\n";
    for (const auto& [pattern, count] : measure.counts)
        out << measure.pattern_string(pattern) << ',' << count << '\n';
}

namespace {

json params_json(const std::map<std::string, double>& params) {
    json j = json::object();
    for (const auto& [k, v] : params) j[k] = v;
    return j;
}

json report_to_json(const EstimateReport& r) {
    json j;
    j["schema_version"] = 1;
    j["op"] = r.op;
    j["estimate"] = r.estimate;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["replicas"] = r.replicas;
    j["seed"] = r.seed;
    j["params"] = params_json(r.params);
    return j;
}

}  // namespace

std::string report_json(const EstimateReport& report) { return report_to_json(report).dump(); }

std::string report_csv_header() { return "op,estimate,ci_low,ci_high,replicas,seed,params"; }

std::string report_csv_row(const EstimateReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << report.op << ',' << report.estimate << ',' << report.ci_low << ',' << report.ci_high << ','
        << report.replicas << ',' << report.seed << ',';
    bool first = true;
    for (const auto& [k, v] : report.params) {
        out << (first ? "" : ";") << k << '=' << v;
        first = false;
    }
    return out.str();
}

std::string measure_json(const EmpiricalEdgeMeasure& measure) {
    json j;
    j["schema_version"] = 1;
    j["op"] = "empirical_measure";
    j["depth"] = measure.depth;
    j["sample_time"] = measure.sample_time;
    j["replicas"] = measure.replicas;
    j["seed"] = measure.seed;
    json counts = json::object();
    for (const auto& [pattern, count] : measure.counts) counts[measure.pattern_string(pattern)] = count;
    j["counts"] = counts;
    return j.dump();
}

std::string calibration_json(const CalibrationResult& result) {
    json j;
    j["schema_version"] = 1;
    j["op"] = "calibrate_lambda_c";
    j["lo"] = result.lo;
    j["hi"] = result.hi;
    j["lambda_hat"] = result.lambda_hat();
    j["horizon"] = result.horizon;
    j["ratio_threshold"] = result.ratio_threshold;
    j["replicas"] = result.replicas;
    j["seed"] = result.seed;
    json evals = json::array();
    for (const auto& e : result.evaluations) {
        json row;
        row["rate"] = e.rate;
        row["estimate"] = e.report.estimate;
        row["ci_low"] = e.report.ci_low;
        row["ci_high"] = e.report.ci_high;
        row["replicas"] = e.report.replicas;
        evals.push_back(row);
    }
    j["evaluations"] = evals;
    return j.dump();
}

CalibrationResult calibration_from_json(const std::string& text) {
    const json j = json::parse(text);
    CalibrationResult r;
    r.lo = j.at("lo").get<double>();
    r.hi = j.at("hi").get<double>();
    r.horizon = j.value("horizon", 0.0);
    r.ratio_threshold = j.value("ratio_threshold", 0.0);
    r.replicas = j.value("replicas", int64_t{0});
    r.seed = j.value("seed", uint64_t{0});
    return r;
}

}  // namespace bcp
