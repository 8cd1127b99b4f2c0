#pragma once

#include <set>
#include <stdexcept>

#include "bcp/event_log.hpp"

namespace bcp {

// Occupied sites inside a window, in absolute lattice coordinates. In
// left_infinite mode the window's lowest cell stands for "this site and
// everything to its left is occupied": it is always occupied and no site is
// ever considered leftmost.
struct Configuration {
    enum class Mode { finite, left_infinite };

    Mode mode = Mode::finite;
    Interval window;
    std::set<int64_t> occupied;

    static Configuration finite(Interval window, std::set<int64_t> occupied = {}) {
        Configuration c{Mode::finite, window, std::move(occupied)};
        c.validate();
        return c;
    }

    // Everything at or left of `window.lo` occupied, plus `occupied` above it.
    static Configuration left_infinite(Interval window, std::set<int64_t> occupied = {}) {
        occupied.insert(window.lo);
        Configuration c{Mode::left_infinite, window, std::move(occupied)};
        c.validate();
        return c;
    }

    // All of the window occupied; rightmost site at window.hi.
    static Configuration all_left_of(int64_t rightmost, int64_t depth) {
        Interval w{rightmost - depth, rightmost};
        std::set<int64_t> occ;
        for (int64_t x = w.lo; x <= w.hi; ++x) occ.insert(x);
        return {Mode::left_infinite, w, std::move(occ)};
    }

    bool empty() const { return occupied.empty(); }

    int64_t rightmost() const {
        if (occupied.empty()) throw std::domain_error("Configuration: rightmost of empty set");
        return *occupied.rbegin();
    }

    int64_t leftmost() const {
        if (occupied.empty()) throw std::domain_error("Configuration: leftmost of empty set");
        return *occupied.begin();
    }

    bool contains(int64_t site) const { return occupied.count(site) > 0; }

    void validate() const {
        for (int64_t x : occupied)
            if (!window.contains(x)) throw std::invalid_argument("Configuration: occupied site outside window");
        if (mode == Mode::left_infinite && occupied.count(window.lo) == 0)
            throw std::invalid_argument("Configuration: left_infinite mode requires window.lo occupied");
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Translate so the rightmost occupied site lands at absolute coordinate 0.
Configuration seen_from_edge(const Configuration& config);

}  // namespace bcp
