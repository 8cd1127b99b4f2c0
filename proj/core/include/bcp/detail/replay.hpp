#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bcp/border_rule.hpp"
#include "bcp/event_log.hpp"

// Replay machinery shared by the public dynamics operations and the Monte
// Carlo estimators. Marks are only simulated for occupied sites: recoveries
// at vacant sites and arrows sourced there change nothing, so a site's
// substreams join the schedule when it becomes occupied and are fast-forwarded
// past the vacant span when it does so again. Counter-based substreams make
// the skipped marks identical to the ones a merged log would contain.
namespace bcp::detail {

struct SiteStreams {
    SubstreamCursor cursor[3];
    bool active = false;
};

// Merged next-mark schedule over the active sites' substreams. Entries are
// invalidated lazily: an entry is live iff its site is active and its time
// still equals the cursor's pending mark.
class StreamSchedule {
public:
    StreamSchedule(uint64_t seed, double lambda_max, double horizon)
        : seed_(seed), lambda_max_(lambda_max), horizon_(horizon) {}

    double lambda_max() const { return lambda_max_; }

    void activate(int64_t site, double now) {
        SiteStreams& ss = site_streams(site);
        if (ss.active) return;
        ss.active = true;
        for (uint32_t k = 0; k < 3; ++k) {
            ss.cursor[k].skip_until_after(now);
            push_entry(site, k, ss);
        }
    }

    void deactivate(SiteStreams* ss) { ss->active = false; }

    void deactivate(int64_t site) {
        auto it = table_.find(site);
        if (it != table_.end()) it->second.active = false;
    }

    struct Delivery {
        Mark mark;
        SiteStreams* streams = nullptr;
    };

    // Next live mark with time <= limit, in (time, site, kind) order.
    std::optional<Delivery> pop_next(double limit) {
        while (!heap_.empty()) {
            const Entry top = heap_.top();
            if (top.time > limit) return std::nullopt;
            heap_.pop();
            SiteStreams& ss = *top.streams;
            if (!ss.active || ss.cursor[top.kind].peek_time() != top.time) continue;  // stale
            Delivery d{ss.cursor[top.kind].pop(), &ss};
            push_entry(top.site, top.kind, ss);
            return d;
        }
        return std::nullopt;
    }

private:
    struct Entry {
        double time;
        int64_t site;
        uint32_t kind;
        SiteStreams* streams;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.site != b.site) return a.site > b.site;
            return a.kind > b.kind;
        }
    };

    SiteStreams& site_streams(int64_t site) {
        auto [it, inserted] = table_.try_emplace(site);
        if (inserted) {
            for (uint32_t k = 0; k < 3; ++k)
                it->second.cursor[k] = SubstreamCursor(seed_, site, static_cast<MarkKind>(k), lambda_max_);
        }
        return it->second;
    }

    void push_entry(int64_t site, uint32_t kind, SiteStreams& ss) {
        const double t = ss.cursor[kind].peek_time();
        if (t <= horizon_) heap_.push(Entry{t, site, kind, &ss});
    }

    uint64_t seed_;
    double lambda_max_;
    double horizon_;
    std::unordered_map<int64_t, SiteStreams> table_;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
};

// Occupancy bitmap over a growable span of sites, tracking count and the
// extremes. Scans on extreme-site deaths are amortized by the births that
// created the span.
class SpanOccupancy {
public:
    void reset(std::span<const int64_t> sites) {
        bits_.clear();
        count_ = 0;
        if (sites.empty()) return;
        int64_t lo = sites[0], hi = sites[0];
        for (int64_t s : sites) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        base_ = lo - 8;
        bits_.assign(static_cast<size_t>(hi - base_ + 9), 0);
        for (int64_t s : sites) set(s);
    }

    bool test(int64_t site) const {
        const int64_t i = site - base_;
        return i >= 0 && i < static_cast<int64_t>(bits_.size()) && bits_[static_cast<size_t>(i)] != 0;
    }

    void set(int64_t site) {
        ensure(site);
        uint8_t& b = bits_[static_cast<size_t>(site - base_)];
        if (b) return;
        b = 1;
        if (count_ == 0) {
            min_ = max_ = site;
        } else {
            min_ = std::min(min_, site);
            max_ = std::max(max_, site);
        }
        ++count_;
    }

    void clear(int64_t site) {
        if (!test(site)) return;
        bits_[static_cast<size_t>(site - base_)] = 0;
        --count_;
        if (count_ == 0) return;
        if (site == min_)
            while (!test(min_)) ++min_;
        if (site == max_)
            while (!test(max_)) --max_;
    }

    bool empty() const { return count_ == 0; }
    int64_t count() const { return count_; }
    int64_t min() const { return min_; }
    int64_t max() const { return max_; }

    template <class Fn>
    void for_each(Fn&& fn) const {
        if (count_ == 0) return;
        for (int64_t s = min_; s <= max_; ++s)
            if (bits_[static_cast<size_t>(s - base_)]) fn(s);
    }

private:
    void ensure(int64_t site) {
        if (bits_.empty()) {
            base_ = site - 8;
            bits_.assign(17, 0);
            return;
        }
        if (site < base_) {
            const int64_t shift = std::max<int64_t>(base_ - site + 8, static_cast<int64_t>(bits_.size()));
            std::vector<uint8_t> grown(bits_.size() + static_cast<size_t>(shift), 0);
            std::copy(bits_.begin(), bits_.end(), grown.begin() + static_cast<size_t>(shift));
            bits_ = std::move(grown);
            base_ -= shift;
        }
        const int64_t i = site - base_;
        if (i >= static_cast<int64_t>(bits_.size()))
            bits_.resize(std::max<size_t>(static_cast<size_t>(i + 8), bits_.size() * 2), 0);
    }

    std::vector<uint8_t> bits_;
    int64_t base_ = 0;
    int64_t min_ = 0;
    int64_t max_ = 0;
    int64_t count_ = 0;
};

// Read-only view handed to observers.
class FiniteState {
public:
    explicit FiniteState(const SpanOccupancy& occ) : occ_(occ) {}
    bool test(int64_t site) const { return occ_.test(site); }
    bool empty() const { return occ_.empty(); }
    int64_t count() const { return occ_.count(); }
    int64_t leftmost() const { return occ_.min(); }
    int64_t rightmost() const { return occ_.max(); }
    template <class Fn>
    void for_each(Fn&& fn) const {
        occ_.for_each(fn);
    }

private:
    const SpanOccupancy& occ_;
};

// Provider concepts: StreamedMarks pulls from per-site substreams keyed by a
// seed (sites enter the schedule as they become occupied); LoggedMarks walks
// a materialized EventLog. Both deliver in (time, site, kind) order.
class StreamedMarks {
public:
    StreamedMarks(uint64_t seed, double lambda_max, double horizon) : schedule_(seed, lambda_max, horizon) {}

    void activate(int64_t site, double now) { schedule_.activate(site, now); }
    void on_vacated(SiteStreams* ss) { schedule_.deactivate(ss); }
    void on_vacated_site(int64_t site) { schedule_.deactivate(site); }
    std::optional<StreamSchedule::Delivery> next(double limit) { return schedule_.pop_next(limit); }

private:
    StreamSchedule schedule_;
};

class LoggedMarks {
public:
    LoggedMarks(const EventLog& log, double t0) : log_(log) {
        while (i_ < log_.marks.size() && log_.marks[i_].time <= t0) ++i_;
    }

    void activate(int64_t, double) {}
    void on_vacated(SiteStreams*) {}
    void on_vacated_site(int64_t) {}

    std::optional<StreamSchedule::Delivery> next(double limit) {
        if (i_ >= log_.marks.size() || log_.marks[i_].time > limit) return std::nullopt;
        return StreamSchedule::Delivery{log_.marks[i_++], nullptr};
    }

private:
    const EventLog& log_;
    size_t i_ = 0;
};

struct FiniteRunConfig {
    const BorderRule* rule = nullptr;
    std::optional<Interval> clip;     // arrows leaving the clip are dropped
    std::optional<int64_t> pinned;    // never dies, no leftmost role anywhere (left-infinite emulation)
    double t0 = 0.0;
    double horizon = 0.0;
    bool restart_on_extinction = false;  // re-occupy the initial set and carry on
};

// Core finite-mode loop. Obs must provide:
//   void advance_to(double t, const FiniteState&);   // called before marks and once past the horizon
//   void on_jump(double t, int64_t site, bool birth, const FiniteState&);
//   void on_extinct(double t, const FiniteState&);
//   bool done() const;
// Unless cfg.restart_on_extinction is set, the empty set is absorbing: the
// loop stops consuming marks and emits the remaining samples on the empty state.
template <class Provider, class Obs>
void run_finite(Provider& marks, const FiniteRunConfig& cfg, std::span<const int64_t> init, Obs& obs) {
    const BorderRule& rule = *cfg.rule;
    SpanOccupancy occ;
    occ.reset(init);
    const FiniteState state(occ);

    for (int64_t s : init) marks.activate(s, cfg.t0);

    const bool pinned_mode = cfg.pinned.has_value();
    const int64_t pin = pinned_mode ? *cfg.pinned : 0;

    while (!obs.done() && !(occ.empty() && !cfg.restart_on_extinction)) {
        auto delivery = marks.next(cfg.horizon);
        if (!delivery) break;
        const Mark& m = delivery->mark;
        obs.advance_to(m.time, state);
        if (obs.done()) break;

        if (m.kind == MarkKind::recovery) {
            if (!occ.test(m.site)) continue;
            if (pinned_mode && m.site == pin) continue;
            occ.clear(m.site);
            if (delivery->streams)
                marks.on_vacated(delivery->streams);
            else
                marks.on_vacated_site(m.site);
            obs.on_jump(m.time, m.site, false, state);
            if (occ.empty()) {
                obs.on_extinct(m.time, state);
                if (!cfg.restart_on_extinction) break;
                occ.reset(init);
                for (int64_t s : init) marks.activate(s, m.time);
            }
            continue;
        }

        if (!occ.test(m.site)) continue;
        const int64_t target = m.site + arrow_step(m.kind);
        if (occ.test(target)) continue;
        if (cfg.clip && !cfg.clip->contains(target)) continue;
        const bool src_left = !pinned_mode && m.site == occ.min();
        const bool src_right = m.site == occ.max();
        if (m.level >= rule.transmission_rate(src_left, src_right, m.kind)) continue;
        occ.set(target);
        marks.activate(target, m.time);
        obs.on_jump(m.time, target, true, state);
    }
    obs.advance_to(std::numeric_limits<double>::infinity(), state);
}

// State of the sliding-window emulation of a left-infinite configuration.
// The window is [edge - depth, edge]; its lowest cell is pinned occupied and
// stands for the infinite occupied tail, so the process can never die and no
// site ever plays the leftmost role.
class AnchoredState {
public:
    AnchoredState(int64_t depth) : depth_(depth), ring_(static_cast<size_t>(depth + 1), 0) {}

    int64_t right_edge() const { return edge_; }
    int64_t depth() const { return depth_; }
    int64_t pinned_site() const { return edge_ - depth_; }

    // k in [-depth, 0], relative to the right edge.
    bool occupied_rel(int64_t k) const { return ring_[slot(edge_ + k)] != 0; }
    bool occupied_abs(int64_t site) const { return ring_[slot(site)] != 0; }

    // Occupancy of sites edge-1 .. edge-L packed into bits 0 .. L-1.
    uint32_t pattern_bits(int64_t cylinder_depth) const {
        uint32_t bits = 0;
        for (int64_t i = 0; i < cylinder_depth; ++i)
            if (occupied_rel(-(i + 1))) bits |= (1u << i);
        return bits;
    }

    int64_t occupied_count() const {
        int64_t n = 0;
        for (uint8_t b : ring_) n += b;
        return n;
    }

private:
    size_t slot(int64_t site) const {
        const int64_t m = depth_ + 1;
        return static_cast<size_t>(((site % m) + m) % m);
    }

    friend class AnchoredEngine;
    int64_t depth_;
    int64_t edge_ = 0;
    std::vector<uint8_t> ring_;
};

class AnchoredEngine {
public:
    AnchoredEngine(const BorderRule& rule, double lambda_max, uint64_t seed, int64_t depth, double horizon)
        : rule_(rule), horizon_(horizon), state_(depth), marks_(seed, lambda_max, horizon) {
        if (depth < 2) throw std::invalid_argument("anchored run: depth must be at least 2");
        if (rule.max_rate() > lambda_max)
            throw std::invalid_argument("anchored run: rule rate exceeds lambda_max");
    }

    // Window cells are taken from `init`; everything at or below init.window.lo
    // counts as occupied.
    void reset(const Configuration& init) {
        if (init.mode != Configuration::Mode::left_infinite)
            throw std::invalid_argument("anchored run: initial configuration must be left-infinite");
        state_.edge_ = init.rightmost();
        const int64_t lo = state_.pinned_site();
        for (int64_t s = lo; s <= state_.edge_; ++s) {
            const bool occ = s <= init.window.lo || init.contains(s) || s == lo;
            state_.ring_[state_.slot(s)] = occ ? 1 : 0;
            if (occ) marks_.activate(s, 0.0);
        }
    }

    // Obs: advance_to(t, AnchoredState), on_jump(t, site, birth, AnchoredState), done().
    template <class Obs>
    void run(Obs& obs) {
        while (!obs.done()) {
            auto delivery = marks_.next(horizon_);
            if (!delivery) break;
            const Mark& m = delivery->mark;
            obs.advance_to(m.time, state_);
            if (obs.done()) break;

            if (m.kind == MarkKind::recovery) {
                if (m.site == state_.pinned_site()) continue;  // pinned cell never dies
                if (!state_.occupied_abs(m.site)) continue;    // stale only when site left the window
                state_.ring_[state_.slot(m.site)] = 0;
                marks_.on_vacated(delivery->streams);
                if (m.site == state_.edge_) slide_left(m.time);
                obs.on_jump(m.time, m.site, false, state_);
                continue;
            }

            if (!in_window(m.site) || !state_.occupied_abs(m.site)) continue;
            const int64_t target = m.site + arrow_step(m.kind);
            if (m.level >= rule_.transmission_rate(false, m.site == state_.edge_, m.kind)) continue;
            if (target > state_.edge_) {  // only the edge site reaches here
                slide_right(m.time);
                obs.on_jump(m.time, target, true, state_);
            } else if (in_window(target) && !state_.occupied_abs(target)) {
                state_.ring_[state_.slot(target)] = 1;
                marks_.activate(target, m.time);
                obs.on_jump(m.time, target, true, state_);
            }
        }
        obs.advance_to(std::numeric_limits<double>::infinity(), state_);
    }

    const AnchoredState& state() const { return state_; }

private:
    bool in_window(int64_t site) const {
        return site >= state_.pinned_site() && site <= state_.edge_;
    }

    void slide_right(double now) {
        const int64_t old_pin = state_.pinned_site();
        marks_.on_vacated_site(old_pin);  // leaves the window (still conceptually occupied)
        const int64_t born = state_.edge_ + 1;
        state_.edge_ = born;
        state_.ring_[state_.slot(born)] = 1;  // reuses old_pin's slot
        marks_.activate(born, now);
        const int64_t new_pin = state_.pinned_site();
        if (!state_.occupied_abs(new_pin)) {
            state_.ring_[state_.slot(new_pin)] = 1;  // forced by the emulation
            marks_.activate(new_pin, now);
        }
    }

    void slide_left(double now) {
        const int64_t old_edge = state_.edge_;
        const int64_t old_pin = state_.pinned_site();
        int64_t edge = old_edge - 1;
        while (!state_.occupied_abs(edge)) --edge;  // pinned cell guarantees a hit
        state_.edge_ = edge;
        // Slots of the vacant cells (edge, old_edge] are re-purposed for the
        // newly exposed cells of the occupied tail.
        for (int64_t s = state_.pinned_site(); s < old_pin; ++s) {
            state_.ring_[state_.slot(s)] = 1;
            marks_.activate(s, now);
        }
    }

    const BorderRule& rule_;
    double horizon_;
    AnchoredState state_;
    StreamedMarks marks_;
};

}  // namespace bcp::detail
