#pragma once

#include <cstdint>
#include <vector>

#include "bcp/border_rule.hpp"

namespace bcp::exact {

// Probability vector over the 2^n occupancy states of an n-site window,
// indexed by bitmask (bit k = site k occupied; state 0 is the empty set).
struct DistributionVector {
    std::vector<double> p;

    static DistributionVector point_mass(int n_sites, uint32_t state);
    double total() const;
};

// Rate matrix of the clipped process on sites {0, .., n-1}: occupied sites
// recover at rate 1, infections pick the role rate of their source, and
// arrows leaving the window are dropped. The empty state is absorbing.
struct Generator {
    int n_sites = 0;
    BorderRule rule;
    std::vector<std::vector<std::pair<uint32_t, double>>> transitions;  // per state: (target, rate)
    std::vector<double> exit_rate;                                      // per state: total outflow

    // Rate of the single-flip transition from `from` to `to`; zero when the
    // states do not differ in exactly one site.
    double rate(uint32_t from, uint32_t to) const;
};

Generator build_generator(int n_sites, const BorderRule& rule);

// exp(tQ) applied by uniformization; truncation tail below 1e-10 in total
// variation.
DistributionVector transient(const Generator& gen, const DistributionVector& init, double t);

// Probability that the process started from `init_state` is empty by time t.
double extinction_by(const Generator& gen, uint32_t init_state, double t);

}  // namespace bcp::exact
