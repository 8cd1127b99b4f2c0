#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "bcp/exact.hpp"

// Test-side oracles, independent of the replay engine they are used to check.
namespace bcp::testing {

// Joint occupancy probability for the clipped process on {0,..,n-1}: the
// chance that every (site, time) target is occupied at its time, starting
// from `source_mask` at time t0. Evolves the distribution between target
// times and keeps only the mass on states covering the due targets.
inline double box_connect_probability(const BorderRule& rule, int n_sites, uint32_t source_mask,
                                      std::vector<std::pair<int, double>> targets, double t0 = 0.0) {
    const auto gen = exact::build_generator(n_sites, rule);

    std::map<double, uint32_t> required;  // time -> mask of sites that must be occupied
    for (const auto& [site, time] : targets) {
        if (time < t0) throw std::invalid_argument("target before start");
        required[time] |= 1u << site;
    }

    auto dist = exact::DistributionVector::point_mass(n_sites, source_mask);
    double mass = 1.0;
    double now = t0;
    for (const auto& [time, mask] : required) {
        if (time > now) dist = exact::transient(gen, dist, time - now);
        now = time;
        double keep = 0.0;
        for (uint32_t s = 0; s < dist.p.size(); ++s)
            if ((s & mask) == mask) keep += dist.p[s];
        mass *= keep;
        if (keep == 0.0) return 0.0;
        for (uint32_t s = 0; s < dist.p.size(); ++s)
            dist.p[s] = (s & mask) == mask ? dist.p[s] / keep : 0.0;
    }
    return mass;
}

}  // namespace bcp::testing
