#include "bcp/trajectory.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace bcp {

int64_t Trajectory::right_edge_at(double t) const {
    auto it = std::upper_bound(right_edge.begin(), right_edge.end(), t,
                               [](double value, const auto& entry) { return value < entry.first; });
    if (it == right_edge.begin()) throw std::domain_error("right_edge_at: no edge recorded by this time");
    return std::prev(it)->second;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "time,event,site,right_edge\n";
    size_t edge_idx = 0;
    int64_t edge = 0;
    bool have_edge = false;
    for (const Jump& j : trajectory.jumps) {
        while (edge_idx < trajectory.right_edge.size() && trajectory.right_edge[edge_idx].first <= j.time) {
            edge = trajectory.right_edge[edge_idx].second;
            have_edge = true;
            ++edge_idx;
        }
        out << j.time << ',' << (j.kind == JumpKind::birth ? "birth" : "death") << ',' << j.site << ',';
        if (have_edge) out << edge;
        out << '\n';
    }
}

void write_snapshots_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "time,pattern\n";
    for (const auto& [t, config] : trajectory.snapshots) {
        out << t << ',';
        for (int64_t s = config.window.lo; s <= config.window.hi; ++s)
            out << (config.contains(s) ? '1' : '0');
        out << '\n';
    }
}

}  // namespace bcp
