#pragma once

#include <span>
#include <vector>

#include "bcp/border_rule.hpp"
#include "bcp/configuration.hpp"
#include "bcp/event_log.hpp"
#include "bcp/trajectory.hpp"

namespace bcp {

// Exact replay of a materialized log. Marks apply in time order: a recovery
// vacates its site; an arrow from an occupied site transmits iff its level is
// below the rate picked by the source's role at that instant and the target
// lies inside the log window. In finite mode the empty set is absorbing; in
// left_infinite mode the window's lowest cell is pinned occupied and no site
// is ever leftmost.
Trajectory evolve(const Configuration& init, const EventLog& log, const BorderRule& rule,
                  std::span<const double> sample_times);

// Identical process driven straight from the substreams of (seed, site, kind)
// without materializing a log; infections leaving `window` are dropped.
Trajectory evolve_streamed(const Configuration& init, const BorderRule& rule, Interval window,
                           double horizon, double lambda_max, uint64_t seed,
                           std::span<const double> sample_times);

// Left-infinite evolution seen from the right edge, on a sliding window of
// `depth` cells behind the edge. Snapshots are anchored patterns on
// [-depth, 0]; jumps and the right-edge series stay in absolute coordinates.
// Pass lambda_max > 0 to share randomness with runs of other rules.
Trajectory evolve_anchored(const Configuration& init, const BorderRule& rule, int64_t depth,
                           double horizon, uint64_t seed, std::span<const double> sample_times,
                           double lambda_max = 0.0);

struct RenewalSequence {
    std::vector<double> times;         // successive extinction times, strictly increasing
    bool final_excursion_alive = false;  // whether the last excursion outlived the horizon

    int64_t count_up_to(double t) const;
};

// Extinction times of the process restarted from {0} after each extinction,
// all driven by one realization of the substreams.
RenewalSequence renewal_times(const BorderRule& rule, double horizon, uint64_t seed);

struct SpaceTimeBox {
    Interval sites;
    double t0 = 0.0;
    double t1 = 0.0;
};

// Runs the process from `source` at box.t0 with every infection leaving
// box.sites suppressed; true iff each target (site, time) is occupied at its
// time in this clipped process.
bool box_connected(const BorderRule& rule, uint64_t seed, Interval source, const SpaceTimeBox& box,
                   std::span<const std::pair<int64_t, double>> targets);

}  // namespace bcp
