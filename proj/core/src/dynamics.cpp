#include "bcp/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

#include "bcp/detail/replay.hpp"

namespace bcp {

namespace {

void check_samples(std::span<const double> sample_times, double horizon) {
    double prev = 0.0;
    for (double t : sample_times) {
        if (t < prev) throw std::invalid_argument("sample_times must be sorted and nonnegative");
        if (t > horizon) throw std::out_of_range("sample time beyond horizon");
        prev = t;
    }
}

std::vector<int64_t> initial_sites(const Configuration& init) {
    return {init.occupied.begin(), init.occupied.end()};
}

// Records jumps, the right-edge series, and snapshot configurations on a
// fixed window.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(std::span<const double> times, Configuration::Mode mode, Interval snap_window)
        : times_(times), mode_(mode), window_(snap_window) {}

    void note_initial_edge(const Configuration& init) {
        if (!init.empty()) traj_.right_edge.emplace_back(0.0, init.rightmost());
    }

    void advance_to(double t, const detail::FiniteState& s) {
        while (next_ < times_.size() && times_[next_] < t) {
            emit(times_[next_], s);
            ++next_;
        }
    }

    void on_jump(double t, int64_t site, bool birth, const detail::FiniteState& s) {
        traj_.jumps.push_back({t, site, birth ? JumpKind::birth : JumpKind::death});
        if (!s.empty()) {
            const int64_t r = s.rightmost();
            if (traj_.right_edge.empty() || traj_.right_edge.back().second != r)
                traj_.right_edge.emplace_back(t, r);
        }
    }

    void on_extinct(double, const detail::FiniteState&) {}
    bool done() const { return false; }

    Trajectory take() { return std::move(traj_); }

private:
    void emit(double t, const detail::FiniteState& s) {
        Configuration c;
        c.mode = mode_;
        c.window = window_;
        s.for_each([&](int64_t site) { c.occupied.insert(site); });
        traj_.snapshots.emplace(t, std::move(c));
    }

    std::span<const double> times_;
    Configuration::Mode mode_;
    Interval window_;
    size_t next_ = 0;
    Trajectory traj_;
};

detail::FiniteRunConfig fixed_window_config(const Configuration& init, const BorderRule& rule,
                                            Interval window, double horizon) {
    detail::FiniteRunConfig cfg;
    cfg.rule = &rule;
    cfg.clip = window;
    cfg.horizon = horizon;
    if (init.mode == Configuration::Mode::left_infinite) cfg.pinned = window.lo;
    return cfg;
}

}  // namespace

Trajectory evolve(const Configuration& init, const EventLog& log, const BorderRule& rule,
                  std::span<const double> sample_times) {
    if (rule.max_rate() > log.lambda_max)
        throw std::invalid_argument("evolve: rule rate exceeds the log's lambda_max");
    if (!log.window.contains(init.window))
        throw std::invalid_argument("evolve: initial window outside the log window");
    if (init.mode == Configuration::Mode::left_infinite && init.window.lo != log.window.lo)
        throw std::invalid_argument("evolve: left-infinite initial window must start at the log window edge");
    check_samples(sample_times, log.horizon);
    init.validate();

    TrajectoryRecorder obs(sample_times, init.mode, log.window);
    obs.note_initial_edge(init);
    const auto cfg = fixed_window_config(init, rule, log.window, log.horizon);
    detail::LoggedMarks marks(log, cfg.t0);
    const auto sites = initial_sites(init);
    detail::run_finite(marks, cfg, sites, obs);
    return obs.take();
}

Trajectory evolve_streamed(const Configuration& init, const BorderRule& rule, Interval window,
                           double horizon, double lambda_max, uint64_t seed,
                           std::span<const double> sample_times) {
    if (!(horizon > 0.0)) throw std::invalid_argument("evolve_streamed: horizon must be positive");
    if (rule.max_rate() > lambda_max)
        throw std::invalid_argument("evolve_streamed: rule rate exceeds lambda_max");
    if (!window.contains(init.window))
        throw std::invalid_argument("evolve_streamed: initial window outside the replay window");
    check_samples(sample_times, horizon);
    init.validate();

    TrajectoryRecorder obs(sample_times, init.mode, window);
    obs.note_initial_edge(init);
    const auto cfg = fixed_window_config(init, rule, window, horizon);
    detail::StreamedMarks marks(seed, lambda_max, horizon);
    const auto sites = initial_sites(init);
    detail::run_finite(marks, cfg, sites, obs);
    return obs.take();
}

namespace {

class AnchoredRecorder {
public:
    explicit AnchoredRecorder(std::span<const double> times) : times_(times) {}

    void note_initial_edge(const detail::AnchoredState& s) {
        traj_.right_edge.emplace_back(0.0, s.right_edge());
    }

    void advance_to(double t, const detail::AnchoredState& s) {
        while (next_ < times_.size() && times_[next_] < t) {
            emit(times_[next_], s);
            ++next_;
        }
    }

    void on_jump(double t, int64_t site, bool birth, const detail::AnchoredState& s) {
        traj_.jumps.push_back({t, site, birth ? JumpKind::birth : JumpKind::death});
        if (traj_.right_edge.back().second != s.right_edge())
            traj_.right_edge.emplace_back(t, s.right_edge());
    }

    bool done() const { return false; }

    Trajectory take() { return std::move(traj_); }

private:
    void emit(double t, const detail::AnchoredState& s) {
        Configuration c;
        c.mode = Configuration::Mode::left_infinite;
        c.window = {-s.depth(), 0};
        for (int64_t k = -s.depth(); k <= 0; ++k)
            if (s.occupied_rel(k)) c.occupied.insert(k);
        traj_.snapshots.emplace(t, std::move(c));
    }

    std::span<const double> times_;
    size_t next_ = 0;
    Trajectory traj_;
};

}  // namespace

Trajectory evolve_anchored(const Configuration& init, const BorderRule& rule, int64_t depth,
                           double horizon, uint64_t seed, std::span<const double> sample_times,
                           double lambda_max) {
    if (!(horizon > 0.0)) throw std::invalid_argument("evolve_anchored: horizon must be positive");
    if (lambda_max <= 0.0) lambda_max = rule.max_rate();
    check_samples(sample_times, horizon);
    init.validate();

    detail::AnchoredEngine engine(rule, lambda_max, seed, depth, horizon);
    engine.reset(init);
    AnchoredRecorder obs(sample_times);
    obs.note_initial_edge(engine.state());
    engine.run(obs);
    return obs.take();
}

namespace {

class RenewalObserver {
public:
    void advance_to(double, const detail::FiniteState&) {}
    void on_jump(double, int64_t, bool, const detail::FiniteState&) {}
    void on_extinct(double t, const detail::FiniteState&) { times_.push_back(t); }
    bool done() const { return false; }

    std::vector<double> take() { return std::move(times_); }

private:
    std::vector<double> times_;
};

}  // namespace

int64_t RenewalSequence::count_up_to(double t) const {
    return static_cast<int64_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

RenewalSequence renewal_times(const BorderRule& rule, double horizon, uint64_t seed) {
    if (!(horizon > 0.0)) throw std::invalid_argument("renewal_times: horizon must be positive");

    detail::FiniteRunConfig cfg;
    cfg.rule = &rule;
    cfg.horizon = horizon;
    cfg.restart_on_extinction = true;
    detail::StreamedMarks marks(seed, rule.max_rate(), horizon);
    RenewalObserver obs;
    const int64_t origin[] = {0};
    detail::run_finite(marks, cfg, origin, obs);

    RenewalSequence seq{obs.take(), false};
    seq.final_excursion_alive = seq.times.empty() || seq.times.back() < horizon;
    return seq;
}

namespace {

class TargetChecker {
public:
    explicit TargetChecker(std::vector<std::pair<double, int64_t>> targets)
        : targets_(std::move(targets)) {}

    void advance_to(double t, const detail::FiniteState& s) {
        while (next_ < targets_.size() && targets_[next_].first < t) {
            if (!s.test(targets_[next_].second)) {
                connected_ = false;
                return;
            }
            ++next_;
        }
    }

    void on_jump(double, int64_t, bool, const detail::FiniteState&) {}
    void on_extinct(double, const detail::FiniteState&) {}
    bool done() const { return !connected_ || next_ >= targets_.size(); }
    bool connected() const { return connected_ && next_ >= targets_.size(); }

private:
    std::vector<std::pair<double, int64_t>> targets_;  // (time, site), time-sorted
    size_t next_ = 0;
    bool connected_ = true;
};

}  // namespace

bool box_connected(const BorderRule& rule, uint64_t seed, Interval source, const SpaceTimeBox& box,
                   std::span<const std::pair<int64_t, double>> targets) {
    if (box.sites.empty() || !(box.t1 > box.t0) || box.t0 < 0.0)
        throw std::invalid_argument("box_connected: malformed box");
    if (!box.sites.contains(source)) throw std::invalid_argument("box_connected: source outside box");
    for (const auto& [site, time] : targets)
        if (!box.sites.contains(site) || time < box.t0 || time > box.t1)
            throw std::invalid_argument("box_connected: target outside box");

    std::vector<std::pair<double, int64_t>> ordered;
    ordered.reserve(targets.size());
    for (const auto& [site, time] : targets) ordered.emplace_back(time, site);
    std::sort(ordered.begin(), ordered.end());

    detail::FiniteRunConfig cfg;
    cfg.rule = &rule;
    cfg.clip = box.sites;
    cfg.t0 = box.t0;
    cfg.horizon = box.t1;
    detail::StreamedMarks marks(seed, rule.max_rate(), box.t1);
    TargetChecker obs(std::move(ordered));

    std::vector<int64_t> sites;
    for (int64_t s = source.lo; s <= source.hi; ++s) sites.push_back(s);
    detail::run_finite(marks, cfg, sites, obs);
    return obs.connected();
}

}  // namespace bcp
