#include "bcp/exact.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace bcp::exact {

DistributionVector DistributionVector::point_mass(int n_sites, uint32_t state) {
    if (n_sites < 1 || n_sites > 12) throw std::invalid_argument("point_mass: need 1 <= n_sites <= 12");
    if (state >= (1u << n_sites)) throw std::invalid_argument("point_mass: state outside window");
    DistributionVector v;
    v.p.assign(size_t{1} << n_sites, 0.0);
    v.p[state] = 1.0;
    return v;
}

double DistributionVector::total() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
}

double Generator::rate(uint32_t from, uint32_t to) const {
    for (const auto& [target, r] : transitions[from])
        if (target == to) return r;
    return 0.0;
}

Generator build_generator(int n_sites, const BorderRule& rule) {
    if (n_sites < 1 || n_sites > 12) throw std::invalid_argument("build_generator: need 1 <= n_sites <= 12");

    Generator gen;
    gen.n_sites = n_sites;
    gen.rule = rule;
    const uint32_t n_states = 1u << n_sites;
    gen.transitions.resize(n_states);
    gen.exit_rate.assign(n_states, 0.0);

    for (uint32_t state = 1; state < n_states; ++state) {
        const int leftmost = std::countr_zero(state);
        const int rightmost = 31 - std::countl_zero(state);
        auto& row = gen.transitions[state];
        for (int x = leftmost; x <= rightmost; ++x) {
            if (!(state & (1u << x))) continue;
            row.emplace_back(state & ~(1u << x), 1.0);  // recovery
            for (MarkKind kind : {MarkKind::arrow_right, MarkKind::arrow_left}) {
                const int y = x + static_cast<int>(arrow_step(kind));
                if (y < 0 || y >= n_sites) continue;  // dropped at the window boundary
                if (state & (1u << y)) continue;
                const double r = rule.transmission_rate(x == leftmost, x == rightmost, kind);
                if (r > 0.0) row.emplace_back(state | (1u << y), r);
            }
        }
        for (const auto& [target, r] : row) gen.exit_rate[state] += r;
    }
    return gen;
}

DistributionVector transient(const Generator& gen, const DistributionVector& init, double t) {
    if (t < 0.0) throw std::invalid_argument("transient: negative time");
    const size_t n_states = size_t{1} << gen.n_sites;
    if (init.p.size() != n_states) throw std::invalid_argument("transient: dimension mismatch");

    if (t == 0.0) return init;

    // Uniformization constant dominating every state's total outflow.
    const double big_lambda = gen.n_sites * (1.0 + 2.0 * gen.rule.max_rate());
    const double lt = big_lambda * t;
    constexpr double kTailMass = 1e-10;

    DistributionVector result;
    result.p.assign(n_states, 0.0);
    std::vector<double> u = init.p;
    std::vector<double> next(n_states, 0.0);

    double cumulative = 0.0;
    const double log_lt = std::log(lt);
    for (uint64_t k = 0; cumulative < 1.0 - kTailMass; ++k) {
        const double log_w = -lt + static_cast<double>(k) * log_lt - std::lgamma(static_cast<double>(k) + 1.0);
        const double w = std::exp(log_w);
        if (w > 0.0) {
            for (size_t s = 0; s < n_states; ++s) result.p[s] += w * u[s];
            cumulative += w;
        }
        // u <- u P with P = I + Q / big_lambda
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t s = 0; s < n_states; ++s) {
            const double mass = u[s];
            if (mass == 0.0) continue;
            next[s] += mass * (1.0 - gen.exit_rate[s] / big_lambda);
            for (const auto& [target, r] : gen.transitions[s]) next[target] += mass * (r / big_lambda);
        }
        u.swap(next);
    }
    return result;
}

double extinction_by(const Generator& gen, uint32_t init_state, double t) {
    if (init_state == 0) return 1.0;
    const auto out = transient(gen, DistributionVector::point_mass(gen.n_sites, init_state), t);
    return out.p[0];
}

}  // namespace bcp::exact
