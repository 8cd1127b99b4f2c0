#include "bcp/event_log.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace bcp {

EventLog make_log(Interval window, double horizon, double lambda_max, uint64_t seed) {
    if (!(horizon > 0.0)) throw std::invalid_argument("make_log: horizon must be positive");
    if (lambda_max < 0.0) throw std::invalid_argument("make_log: lambda_max must be nonnegative");
    if (window.empty()) throw std::invalid_argument("make_log: window must be nonempty");

    EventLog log{window, horizon, lambda_max, seed, {}};
    const double per_site = 1.0 + 2.0 * lambda_max;
    log.marks.reserve(static_cast<size_t>(per_site * horizon * static_cast<double>(window.size()) * 1.1) + 16);

    for (int64_t site = window.lo; site <= window.hi; ++site) {
        for (MarkKind kind : {MarkKind::recovery, MarkKind::arrow_right, MarkKind::arrow_left}) {
            SubstreamCursor cur(seed, site, kind, lambda_max);
            while (cur.peek_time() <= horizon) log.marks.push_back(cur.pop());
        }
    }
    std::sort(log.marks.begin(), log.marks.end(), mark_before);
    return log;
}

bool is_open(const Mark& mark, double lambda) {
    if (!is_arrow(mark.kind)) throw std::invalid_argument("is_open: recovery marks carry no level");
    if (lambda < 0.0) throw std::invalid_argument("is_open: lambda must be nonnegative");
    return mark.level < lambda;
}

std::vector<Mark> merge_view(const EventLog& log, Interval sub_window, double t0, double t1) {
    if (!log.window.contains(sub_window)) throw std::out_of_range("merge_view: sub_window outside log window");
    if (t0 < 0.0 || t1 > log.horizon || t0 >= t1)
        throw std::out_of_range("merge_view: need 0 <= t0 < t1 <= horizon");

    std::vector<Mark> out;
    for (const Mark& m : log.marks) {
        if (m.time > t1) break;
        if (m.time > t0 && sub_window.contains(m.site)) out.push_back(m);
    }
    return out;
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
    // memcpy through char buffer; assumes little-endian host
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

void dump_log(const EventLog& log, std::ostream& out) {
    put<uint64_t>(out, log.seed);
    put<int64_t>(out, log.window.lo);
    put<int64_t>(out, log.window.hi);
    put<double>(out, log.horizon);
    put<double>(out, log.lambda_max);
    put<uint64_t>(out, log.marks.size());
    for (const Mark& m : log.marks) {
        put<double>(out, m.time);
        put<int64_t>(out, m.site);
        put<uint8_t>(out, static_cast<uint8_t>(m.kind));
        put<double>(out, m.level);
    }
}

EventLog load_log(std::istream& in) {
    EventLog log;
    log.seed = get<uint64_t>(in);
    log.window.lo = get<int64_t>(in);
    log.window.hi = get<int64_t>(in);
    log.horizon = get<double>(in);
    log.lambda_max = get<double>(in);
    const uint64_t n = get<uint64_t>(in);
    log.marks.resize(n);
    for (uint64_t i = 0; i < n; ++i) {
        log.marks[i].time = get<double>(in);
        log.marks[i].site = get<int64_t>(in);
        log.marks[i].kind = static_cast<MarkKind>(get<uint8_t>(in));
        log.marks[i].level = get<double>(in);
    }
    if (!in) throw std::runtime_error("load_log: truncated stream");
    return log;
}

void dump_log_file(const EventLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_log_file: cannot open " + path);
    dump_log(log, out);
}

EventLog load_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_log_file: cannot open " + path);
    return load_log(in);
}

}  // namespace bcp
