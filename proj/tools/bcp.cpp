// bcp: batch experiment runner for the border-modified contact process.
//
// Usage: bcp <command> --config <file.json> [--seed N] [--replicas N]
//            [--out PATH] [--format csv|json] [--workers N]
// Commands: survival speed measure agreement critical phase renewal
//           oracle-check calibrate
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcp/dynamics.hpp"
#include "bcp/estimators.hpp"
#include "bcp/exact.hpp"
#include "bcp/philox.hpp"

namespace {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<int64_t> replicas;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> workers;
};

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
    return cfg;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown field \"" + key + "\" in " + where);
}

double get_num(const json& cfg, const std::string& key, std::optional<double> fallback = {}) {
    if (!cfg.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing numeric field \"" + key + "\"");
    }
    if (!cfg.at(key).is_number()) throw ConfigError("field \"" + key + "\" must be a number");
    return cfg.at(key).get<double>();
}

int64_t get_int(const json& cfg, const std::string& key, std::optional<int64_t> fallback = {}) {
    if (!cfg.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing integer field \"" + key + "\"");
    }
    if (!cfg.at(key).is_number_integer()) throw ConfigError("field \"" + key + "\" must be an integer");
    return cfg.at(key).get<int64_t>();
}

std::string get_str(const json& cfg, const std::string& key, std::optional<std::string> fallback = {}) {
    if (!cfg.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing string field \"" + key + "\"");
    }
    if (!cfg.at(key).is_string()) throw ConfigError("field \"" + key + "\" must be a string");
    return cfg.at(key).get<std::string>();
}

// Experiment-wide knobs after config/flag merging (flags win).
struct RunSettings {
    uint64_t seed = 0;
    int64_t replicas = 1000;
    int workers = 0;
    std::string format = "csv";
    std::string out;
};

RunSettings merge_settings(const json& cfg, const CommonFlags& flags, const std::string& default_out) {
    RunSettings s;
    if (flags.seed)
        s.seed = *flags.seed;
    else if (cfg.contains("seed"))
        s.seed = cfg.at("seed").get<uint64_t>();
    else
        throw ConfigError("a seed is required (config field \"seed\" or --seed)");

    s.replicas = flags.replicas ? *flags.replicas : get_int(cfg, "replicas", 1000);
    if (s.replicas < 1) throw ConfigError("replicas must be at least 1");
    s.workers = flags.workers ? *flags.workers : static_cast<int>(get_int(cfg, "workers", 0));
    s.format = flags.format ? *flags.format : get_str(cfg, "format", "csv");
    if (s.format != "csv" && s.format != "json") throw ConfigError("format must be \"csv\" or \"json\"");
    s.out = flags.out ? *flags.out : get_str(cfg, "out", default_out);
    return s;
}

std::optional<double> load_lambda_hat(const json& cfg) {
    if (!cfg.contains("calibration_file")) return std::nullopt;
    const std::string path = get_str(cfg, "calibration_file");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calibration file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return bcp::calibration_from_json(buf.str()).lambda_hat();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad calibration file: ") + e.what());
    }
}

// A rate is a plain number or {"rel": offset} meaning lambda_hat + offset.
double rate_value(const json& v, std::optional<double> lambda_hat, const std::string& name) {
    if (v.is_number()) return v.get<double>();
    if (v.is_object()) {
        check_keys(v, {"rel"}, "rate \"" + name + "\"");
        if (!v.contains("rel") || !v.at("rel").is_number())
            throw ConfigError("rate \"" + name + "\" needs a numeric \"rel\" field");
        if (!lambda_hat)
            throw ConfigError("rate \"" + name + "\" is relative but no calibration_file is set");
        return *lambda_hat + v.at("rel").get<double>();
    }
    throw ConfigError("rate \"" + name + "\" must be a number or {\"rel\": offset}");
}

struct RuleSpec {
    bcp::BorderRule rule;
    std::string kind;
    double lambda_i = 0.0;  // interior rate column
    double lambda_e = 0.0;  // outward right-edge rate column
};

RuleSpec parse_rule(const json& cfg, std::optional<double> lambda_hat) {
    if (!cfg.contains("rule")) throw ConfigError("missing \"rule\" object");
    const json& r = cfg.at("rule");
    if (!r.is_object()) throw ConfigError("\"rule\" must be an object");
    const std::string kind = get_str(r, "kind");

    RuleSpec spec;
    spec.kind = kind;
    try {
        if (kind == "standard") {
            check_keys(r, {"kind", "lambda_i", "lambda_e"}, "rule");
            const double li = rate_value(r.at("lambda_i"), lambda_hat, "lambda_i");
            const double le = rate_value(r.at("lambda_e"), lambda_hat, "lambda_e");
            spec.rule = bcp::BorderRule::standard(li, le);
        } else if (kind == "classical") {
            check_keys(r, {"kind", "lambda"}, "rule");
            const double l = rate_value(r.at("lambda"), lambda_hat, "lambda");
            spec.rule = bcp::BorderRule::classical(l);
        } else if (kind == "zeta") {
            check_keys(r, {"kind", "lambda", "epsilon"}, "rule");
            const double l = rate_value(r.at("lambda"), lambda_hat, "lambda");
            const double eps = rate_value(r.at("epsilon"), lambda_hat, "epsilon");
            spec.rule = bcp::BorderRule::zeta(l, eps);
        } else {
            throw ConfigError("unknown rule kind \"" + kind + "\"");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid rule: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed rule object: ") + e.what());
    }
    spec.lambda_i = spec.rule.interior;
    spec.lambda_e = spec.rule.right_edge_out;
    return spec;
}

// One output row per completed experiment unit; the header is fixed and the
// wall_time_seconds column is the only nondeterministic field.
constexpr const char* kCsvHeader =
    "schema_version,experiment,command,rule,lambda_i,lambda_e,horizon,burn_in,depth_w,depth_l,"
    "replicas,seed,estimate,ci_low,ci_high,wall_time_seconds";

struct OutputRow {
    std::string experiment;
    std::string command;
    std::string rule_kind;
    double lambda_i = 0.0, lambda_e = 0.0, horizon = 0.0, burn_in = 0.0;
    int64_t depth_w = 0, depth_l = 0, replicas = 0;
    uint64_t seed = 0;
    double estimate = 0.0, ci_low = 0.0, ci_high = 0.0;
    double wall_time = 0.0;
};

void write_row(std::ostream& out, const OutputRow& r) {
    out << 1 << ',' << r.experiment << ',' << r.command << ',' << r.rule_kind << ',' << fmt(r.lambda_i)
        << ',' << fmt(r.lambda_e) << ',' << fmt(r.horizon) << ',' << fmt(r.burn_in) << ',' << r.depth_w
        << ',' << r.depth_l << ',' << r.replicas << ',' << r.seed << ',' << fmt(r.estimate) << ','
        << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',' << fmt(r.wall_time) << '\n';
    out.flush();
}

json row_json(const OutputRow& r) {
    json j;
    j["schema_version"] = 1;
    j["experiment"] = r.experiment;
    j["command"] = r.command;
    j["rule"] = r.rule_kind;
    j["lambda_i"] = r.lambda_i;
    j["lambda_e"] = r.lambda_e;
    j["horizon"] = r.horizon;
    j["burn_in"] = r.burn_in;
    j["depth_w"] = r.depth_w;
    j["depth_l"] = r.depth_l;
    j["replicas"] = r.replicas;
    j["seed"] = r.seed;
    j["estimate"] = r.estimate;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["wall_time_seconds"] = r.wall_time;
    return j;
}

class RowSink {
public:
    RowSink(const std::string& path, const std::string& format) : format_(format) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        if (format_ == "csv") {
            out_ << kCsvHeader << '\n';
            out_.flush();
        }
    }

    void push(const OutputRow& row) {
        if (format_ == "csv") {
            write_row(out_, row);
        } else {
            out_ << row_json(row).dump() << '\n';
            out_.flush();
        }
        std::cout << row.experiment << ": estimate=" << row.estimate << " ci=[" << row.ci_low << ", "
                  << row.ci_high << "] replicas=" << row.replicas << "\n";
    }

private:
    std::string format_;
    std::ofstream out_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

uint64_t experiment_seed(uint64_t master, uint64_t experiment_index, uint64_t command_tag) {
    return bcp::derive_seed(master, experiment_index, 0x100 + command_tag);
}

bcp::Configuration gapped_tail(int64_t depth_w, int64_t gap_depth) {
    auto c = bcp::Configuration::all_left_of(0, depth_w);
    for (int64_t k = 1; k <= gap_depth; ++k) c.occupied.erase(-k);
    return c;
}

const std::set<std::string> kGlobalKeys = {"command", "seed", "replicas", "workers", "out",
                                           "format",  "rule", "calibration_file"};

std::set<std::string> with_global(std::set<std::string> extra) {
    extra.insert(kGlobalKeys.begin(), kGlobalKeys.end());
    return extra;
}

void check_command_field(const json& cfg, const std::string& command) {
    if (cfg.contains("command") && cfg.at("command").get<std::string>() != command)
        throw ConfigError("config is for command \"" + cfg.at("command").get<std::string>() +
                          "\", invoked as \"" + command + "\"");
}

int run_survival(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "survival");
    check_keys(cfg, with_global({"horizon", "alive_cap"}), "survival config");
    const auto settings = merge_settings(cfg, flags, "survival.csv");
    const auto spec = parse_rule(cfg, load_lambda_hat(cfg));
    const double horizon = get_num(cfg, "horizon");
    const int64_t cap = get_int(cfg, "alive_cap", 256);

    const auto start = std::chrono::steady_clock::now();
    const auto report = bcp::estimate_theta(spec.rule, horizon, settings.replicas,
                                            experiment_seed(settings.seed, 0, 1), settings.workers, cap);
    OutputRow row{"survival-0", "survival", spec.kind,       spec.lambda_i,  spec.lambda_e,
                  horizon,      0.0,        0,               0,              settings.replicas,
                  settings.seed, report.estimate, report.ci_low, report.ci_high, seconds_since(start)};
    RowSink sink(settings.out, settings.format);
    sink.push(row);
    return 0;
}

int run_speed(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "speed");
    check_keys(cfg, with_global({"horizon", "burn_in", "depth_w", "replica_out"}), "speed config");
    const auto settings = merge_settings(cfg, flags, "speed.csv");
    const auto spec = parse_rule(cfg, load_lambda_hat(cfg));
    const double horizon = get_num(cfg, "horizon");
    const double burn_in = get_num(cfg, "burn_in", 0.0);
    const int64_t depth_w = get_int(cfg, "depth_w", 200);

    const auto start = std::chrono::steady_clock::now();
    const auto out = bcp::estimate_edge_speed(spec.rule, depth_w, burn_in, horizon, settings.replicas,
                                              experiment_seed(settings.seed, 0, 2), settings.workers);
    OutputRow row{"speed-0",     "speed", spec.kind,           spec.lambda_i,      spec.lambda_e,
                  horizon,       burn_in, depth_w,             0,                  settings.replicas,
                  settings.seed, out.report.estimate, out.report.ci_low, out.report.ci_high,
                  seconds_since(start)};
    RowSink sink(settings.out, settings.format);
    sink.push(row);

    if (cfg.contains("replica_out")) {
        std::ofstream per(get_str(cfg, "replica_out"));
        if (!per) throw std::runtime_error("cannot open replica output file");
        per << "replica,speed\n";
        for (size_t i = 0; i < out.per_replica.size(); ++i) per << i << ',' << fmt(out.per_replica[i]) << '\n';
    }
    return 0;
}

int run_measure(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "measure");
    check_keys(cfg, with_global({"depth_w", "depth_l", "sample_time", "gap_depth"}), "measure config");
    const auto settings = merge_settings(cfg, flags, "measure.csv");
    const auto spec = parse_rule(cfg, load_lambda_hat(cfg));
    const int64_t depth_w = get_int(cfg, "depth_w", 200);
    const int64_t depth_l = get_int(cfg, "depth_l", 4);
    const double sample_time = get_num(cfg, "sample_time");
    const int64_t gap = get_int(cfg, "gap_depth", 0);
    if (gap < 0 || gap >= depth_w) throw ConfigError("gap_depth must lie in [0, depth_w)");

    const auto init = gapped_tail(depth_w, gap);
    const auto measure =
        bcp::empirical_measure(spec.rule, init, depth_l, sample_time, settings.replicas,
                               experiment_seed(settings.seed, 0, 3), depth_w, settings.workers);

    std::ofstream out(settings.out);
    if (!out) throw std::runtime_error("cannot open output file: " + settings.out);
    if (settings.format == "csv")
        bcp::write_measure_csv(measure, out);
    else
        out << bcp::measure_json(measure) << '\n';
    std::cout << "measure: " << measure.counts.size() << " distinct patterns over " << measure.replicas
              << " replicas\n";
    return 0;
}

int run_agreement(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "agreement");
    check_keys(cfg, with_global({"depth_w", "depth_l", "sample_time", "gap_depth"}), "agreement config");
    const auto settings = merge_settings(cfg, flags, "agreement.csv");
    const auto spec = parse_rule(cfg, load_lambda_hat(cfg));
    const int64_t depth_w = get_int(cfg, "depth_w", 200);
    const int64_t depth_l = get_int(cfg, "depth_l", 4);
    const double sample_time = get_num(cfg, "sample_time");
    const int64_t gap = get_int(cfg, "gap_depth", 10);
    if (gap < 1 || gap >= depth_w) throw ConfigError("gap_depth must lie in [1, depth_w)");

    const auto start = std::chrono::steady_clock::now();
    const auto report = bcp::agreement_probability(
        spec.rule, bcp::Configuration::all_left_of(0, depth_w), gapped_tail(depth_w, gap), depth_l,
        sample_time, settings.replicas, experiment_seed(settings.seed, 0, 4), depth_w, settings.workers);
    OutputRow row{"agreement-0", "agreement", spec.kind,     spec.lambda_i,  spec.lambda_e,
                  sample_time,   0.0,         depth_w,       depth_l,        settings.replicas,
                  settings.seed, report.estimate, report.ci_low, report.ci_high, seconds_since(start)};
    RowSink sink(settings.out, settings.format);
    sink.push(row);
    return 0;
}

int run_critical(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "critical");
    check_keys(cfg, with_global({"lambda_i", "horizon", "survival_threshold", "tolerance"}),
               "critical config");
    const auto settings = merge_settings(cfg, flags, "critical.csv");
    const double lambda_i = get_num(cfg, "lambda_i");
    const double horizon = get_num(cfg, "horizon", 300.0);
    const double threshold = get_num(cfg, "survival_threshold", 0.005);
    const double tolerance = get_num(cfg, "tolerance", 0.1);

    const auto start = std::chrono::steady_clock::now();
    const auto bracket =
        bcp::estimate_critical_lambda_e(lambda_i, horizon, settings.replicas, threshold, tolerance,
                                        experiment_seed(settings.seed, 0, 5), settings.workers);
    if (!bracket.monotone_within_ci)
        std::cerr << "warning: survival proxy was not monotone in lambda_e beyond CI noise\n";

    OutputRow row{"critical-0",  "critical", "standard",    lambda_i,   bracket.midpoint(),
                  horizon,       0.0,        0,             0,          settings.replicas,
                  settings.seed, bracket.midpoint(), bracket.lo, bracket.hi, seconds_since(start)};
    RowSink sink(settings.out, settings.format);
    sink.push(row);
    std::cout << "bracket: [" << bracket.lo << ", " << bracket.hi << "] from " << bracket.evaluations.size()
              << " probes\n";
    return 0;
}

int run_phase(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "phase");
    check_keys(cfg,
               with_global({"lambda_i_min", "lambda_i_max", "lambda_i_step", "lambda_e_min",
                            "lambda_e_max", "lambda_e_step", "horizon", "alive_cap"}),
               "phase config");
    const auto settings = merge_settings(cfg, flags, "phase.csv");
    const double li_min = get_num(cfg, "lambda_i_min");
    const double li_max = get_num(cfg, "lambda_i_max");
    const double li_step = get_num(cfg, "lambda_i_step");
    const double le_min = get_num(cfg, "lambda_e_min");
    const double le_max = get_num(cfg, "lambda_e_max");
    const double le_step = get_num(cfg, "lambda_e_step");
    const double horizon = get_num(cfg, "horizon", 200.0);
    const int64_t cap = get_int(cfg, "alive_cap", 256);
    if (li_step <= 0.0 || le_step <= 0.0) throw ConfigError("grid steps must be positive");
    if (li_max < li_min || le_max < le_min) throw ConfigError("grid bounds are inverted");

    RowSink sink(settings.out, settings.format);
    uint64_t cell = 0;
    const double eps = 1e-9;
    for (double li = li_min; li <= li_max + eps; li += li_step) {
        for (double le = le_min; le <= le_max + eps; le += le_step) {
            const auto start = std::chrono::steady_clock::now();
            const auto rule = bcp::BorderRule::standard(li, le);
            const auto report = bcp::estimate_theta(rule, horizon, settings.replicas,
                                                    experiment_seed(settings.seed, cell, 6),
                                                    settings.workers, cap);
            OutputRow row{"phase-" + std::to_string(cell), "phase", "standard", li, le,
                          horizon, 0.0, 0, 0, settings.replicas,
                          settings.seed, report.estimate, report.ci_low, report.ci_high,
                          seconds_since(start)};
            sink.push(row);
            ++cell;
        }
    }
    return 0;
}

int run_renewal(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "renewal");
    check_keys(cfg, with_global({"horizon", "dump_times"}), "renewal config");
    const auto settings = merge_settings(cfg, flags, "renewal.csv");
    const auto spec = parse_rule(cfg, load_lambda_hat(cfg));
    const double horizon = get_num(cfg, "horizon");

    const auto start = std::chrono::steady_clock::now();
    std::vector<bcp::RenewalSequence> sequences(static_cast<size_t>(settings.replicas));
    const uint64_t op_seed = experiment_seed(settings.seed, 0, 7);
    for (int64_t r = 0; r < settings.replicas; ++r)
        sequences[static_cast<size_t>(r)] =
            bcp::renewal_times(spec.rule, horizon, bcp::derive_seed(op_seed, static_cast<uint64_t>(r)));

    std::vector<double> rates;
    rates.reserve(sequences.size());
    for (const auto& seq : sequences) rates.push_back(static_cast<double>(seq.times.size()) / horizon);
    const auto ci = bcp::stats::mean_interval(rates);

    OutputRow row{"renewal-0",   "renewal", spec.kind,   spec.lambda_i, spec.lambda_e,
                  horizon,       0.0,       0,           0,             settings.replicas,
                  settings.seed, ci.estimate, ci.ci_low, ci.ci_high,    seconds_since(start)};
    RowSink sink(settings.out, settings.format);
    sink.push(row);

    if (cfg.contains("dump_times")) {
        std::ofstream dump(get_str(cfg, "dump_times"));
        if (!dump) throw std::runtime_error("cannot open dump_times file");
        dump << "replica,index,tau\n";
        for (size_t r = 0; r < sequences.size(); ++r)
            for (size_t k = 0; k < sequences[r].times.size(); ++k)
                dump << r << ',' << k << ',' << fmt(sequences[r].times[k]) << '\n';
    }
    return 0;
}

int run_oracle_check(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "oracle-check");
    check_keys(cfg, with_global({"min_sites", "max_sites", "horizons", "rules"}), "oracle-check config");
    const auto settings = merge_settings(cfg, flags, "oracle_check.csv");
    const int64_t min_sites = get_int(cfg, "min_sites", 1);
    const int64_t max_sites = get_int(cfg, "max_sites", 6);
    if (min_sites < 1 || max_sites > 8 || min_sites > max_sites)
        throw ConfigError("need 1 <= min_sites <= max_sites <= 8");

    std::vector<double> horizons;
    if (cfg.contains("horizons")) {
        if (!cfg.at("horizons").is_array()) throw ConfigError("\"horizons\" must be an array");
        for (const auto& h : cfg.at("horizons")) horizons.push_back(h.get<double>());
    } else {
        horizons = {1.0, 2.0, 5.0};
    }

    std::vector<RuleSpec> rules;
    const auto lambda_hat = load_lambda_hat(cfg);
    if (cfg.contains("rules")) {
        if (!cfg.at("rules").is_array()) throw ConfigError("\"rules\" must be an array");
        for (const auto& r : cfg.at("rules")) {
            json wrapper;
            wrapper["rule"] = r;
            rules.push_back(parse_rule(wrapper, lambda_hat));
        }
    } else {
        rules.push_back({bcp::BorderRule::classical(1.5), "classical", 1.5, 1.5});
        rules.push_back({bcp::BorderRule::standard(1.0, 1.5), "standard", 1.0, 1.5});
    }

    std::ofstream out(settings.out);
    if (!out) throw std::runtime_error("cannot open output file: " + settings.out);
    out << "n_sites,rule,lambda_i,lambda_e,horizon,mc_extinction,exact_extinction,z,pass\n";

    bool all_pass = true;
    uint64_t cell = 0;
    for (const auto& spec : rules) {
        for (int64_t n = min_sites; n <= max_sites; ++n) {
            const auto gen = bcp::exact::build_generator(static_cast<int>(n), spec.rule);
            const uint32_t init = 1u << (static_cast<uint32_t>(n) / 2);
            for (double t : horizons) {
                const double oracle = bcp::exact::extinction_by(gen, init, t);
                const auto mc = bcp::estimate_theta_clipped(spec.rule, static_cast<int>(n), init, t,
                                                            settings.replicas,
                                                            experiment_seed(settings.seed, cell, 8),
                                                            settings.workers);
                const double mc_ext = 1.0 - mc.estimate;
                const double se = bcp::stats::binomial_stderr(oracle, settings.replicas);
                const double z = se > 0.0 ? (mc_ext - oracle) / se : (mc_ext == oracle ? 0.0 : 1e18);
                const bool pass = std::abs(z) <= 4.0;
                all_pass = all_pass && pass;
                out << n << ',' << spec.kind << ',' << fmt(spec.lambda_i) << ',' << fmt(spec.lambda_e)
                    << ',' << fmt(t) << ',' << fmt(mc_ext) << ',' << fmt(oracle) << ',' << fmt(z) << ','
                    << (pass ? 1 : 0) << '\n';
                out.flush();
                ++cell;
            }
        }
    }
    std::cout << (all_pass ? "oracle-check: all cells pass (|z| <= 4)\n"
                           : "oracle-check: FAILURES present (|z| > 4)\n");
    return 0;
}

int run_calibrate(const json& cfg, const CommonFlags& flags) {
    check_command_field(cfg, "calibrate");
    check_keys(cfg, with_global({"precision", "horizon"}), "calibrate config");
    const auto settings = merge_settings(cfg, flags, "calibration.json");
    const double precision = get_num(cfg, "precision", 0.05);
    const double horizon = get_num(cfg, "horizon", 400.0);

    const auto result = bcp::calibrate_lambda_c(precision, horizon, settings.replicas,
                                                experiment_seed(settings.seed, 0, 9), settings.workers);
    std::ofstream out(settings.out);
    if (!out) throw std::runtime_error("cannot open output file: " + settings.out);
    out << bcp::calibration_json(result) << '\n';
    std::cout << "lambda_hat=" << result.lambda_hat() << " bracket=[" << result.lo << ", " << result.hi
              << "] probes=" << result.evaluations.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"border-modified contact process experiment runner"};
    app.require_subcommand(1);

    CommonFlags flags;
    const std::vector<std::pair<std::string, int (*)(const json&, const CommonFlags&)>> commands = {
        {"survival", run_survival},   {"speed", run_speed},         {"measure", run_measure},
        {"agreement", run_agreement}, {"critical", run_critical},   {"phase", run_phase},
        {"renewal", run_renewal},     {"oracle-check", run_oracle_check}, {"calibrate", run_calibrate},
    };

    int rc = 0;
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path)->required();
        sub->add_option("--seed", flags.seed);
        sub->add_option("--replicas", flags.replicas);
        sub->add_option("--out", flags.out);
        sub->add_option("--format", flags.format);
        sub->add_option("--workers", flags.workers);
        sub->callback([&flags, &rc, fn = fn] { rc = fn(load_config(flags.config_path), flags); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
