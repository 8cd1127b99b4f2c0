#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "bcp/philox.hpp"

namespace bcp {

struct Interval {
    int64_t lo = 0;
    int64_t hi = 0;

    bool empty() const { return hi < lo; }
    int64_t size() const { return empty() ? 0 : hi - lo + 1; }
    bool contains(int64_t x) const { return x >= lo && x <= hi; }
    bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class MarkKind : uint8_t { recovery = 0, arrow_right = 1, arrow_left = 2 };

inline bool is_arrow(MarkKind k) { return k != MarkKind::recovery; }

// Lattice displacement of an arrow's target relative to its source.
inline int64_t arrow_step(MarkKind k) { return k == MarkKind::arrow_right ? 1 : -1; }

struct Mark {
    double time = 0.0;
    int64_t site = 0;
    MarkKind kind = MarkKind::recovery;
    double level = std::numeric_limits<double>::quiet_NaN();  // arrows only

    bool has_level() const { return is_arrow(kind); }
};

// Orders marks by (time, site, kind); ties beyond time have probability zero
// but are broken deterministically.
inline bool mark_before(const Mark& a, const Mark& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.site != b.site) return a.site < b.site;
    return static_cast<uint8_t>(a.kind) < static_cast<uint8_t>(b.kind);
}

// Sequential cursor over one (seed, site, kind) substream. Recoveries arrive
// at rate 1, arrows at rate lambda_max with an attached uniform level on
// [0, lambda_max). The k-th mark is a function of the k-th counter block
// only, so a cursor can be re-created and fast-forwarded at any time without
// disturbing marks elsewhere.
class SubstreamCursor {
public:
    SubstreamCursor() = default;

    SubstreamCursor(uint64_t seed, int64_t site, MarkKind kind, double lambda_max)
        : seed_(seed), site_(site), kind_(kind) {
        rate_ = (kind == MarkKind::recovery) ? 1.0 : lambda_max;
        level_scale_ = is_arrow(kind) ? lambda_max : 0.0;
        advance();
    }

    // Time of the next unconsumed mark; +inf when the stream is silent (rate 0).
    double peek_time() const { return next_.time; }
    const Mark& peek() const { return next_; }

    Mark pop() {
        Mark m = next_;
        advance();
        return m;
    }

    void skip_until_after(double t) {
        while (next_.time <= t) advance();
    }

private:
    void advance() {
        if (rate_ <= 0.0) {
            next_.time = std::numeric_limits<double>::infinity();
            return;
        }
        const philox::Block b = stream_block(seed_, site_, static_cast<uint32_t>(kind_), index_++);
        const double u = u01_open(join64(b[0], b[1]));
        acc_ += -std::log(u) / rate_;
        next_.time = acc_;
        next_.site = site_;
        next_.kind = kind_;
        next_.level = is_arrow(kind_) ? level_scale_ * u01(join64(b[2], b[3]))
                                      : std::numeric_limits<double>::quiet_NaN();
    }

    uint64_t seed_ = 0;
    int64_t site_ = 0;
    MarkKind kind_ = MarkKind::recovery;
    double rate_ = 0.0;
    double level_scale_ = 0.0;
    double acc_ = 0.0;
    uint64_t index_ = 0;
    Mark next_{std::numeric_limits<double>::infinity(), 0, MarkKind::recovery,
               std::numeric_limits<double>::quiet_NaN()};
};

// Immutable once built; safe to share across threads.
struct EventLog {
    Interval window;
    double horizon = 0.0;
    double lambda_max = 0.0;
    uint64_t seed = 0;
    std::vector<Mark> marks;  // ordered by mark_before
};

// Materializes every mark of every substream of `window` up to `horizon`.
// The result on any sub-window or shorter horizon is a restriction of the
// result on a larger one, mark for mark.
EventLog make_log(Interval window, double horizon, double lambda_max, uint64_t seed);

// True iff the arrow transmits at rate `lambda`. Rejects recovery marks.
bool is_open(const Mark& mark, double lambda);

// Time-ordered marks with site in `sub_window` and time in (t0, t1].
std::vector<Mark> merge_view(const EventLog& log, Interval sub_window, double t0, double t1);

// Debug dump: little-endian header (seed, window.lo, window.hi, horizon,
// lambda_max), then one (f64 time, i64 site, u8 kind, f64 level) record per
// mark. Layout is not a stability guarantee.
void dump_log(const EventLog& log, std::ostream& out);
EventLog load_log(std::istream& in);
void dump_log_file(const EventLog& log, const std::string& path);
EventLog load_log_file(const std::string& path);

}  // namespace bcp
