#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "bcp/configuration.hpp"

namespace bcp {

enum class JumpKind : uint8_t { birth = 0, death = 1 };

struct Jump {
    double time = 0.0;
    int64_t site = 0;
    JumpKind kind = JumpKind::birth;

    friend bool operator==(const Jump&, const Jump&) = default;
};

// Snapshots are right-continuous: the snapshot at t reflects every jump with
// time <= t. right_edge records (time, rightmost) at t=0 and at every jump
// that moves the rightmost site; nothing is recorded while the set is empty.
struct Trajectory {
    std::vector<Jump> jumps;
    std::map<double, Configuration> snapshots;
    std::vector<std::pair<double, int64_t>> right_edge;

    // Rightmost-site value in effect at time t, from the recorded series.
    int64_t right_edge_at(double t) const;
};

// One "time,event,site,right_edge" row per jump.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

// One "time,pattern" row per snapshot; pattern is the 0/1 occupancy of the
// snapshot's window, leftmost site first.
void write_snapshots_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace bcp
