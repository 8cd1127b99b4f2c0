#pragma once

#include <algorithm>
#include <stdexcept>

#include "bcp/event_log.hpp"

namespace bcp {

// Per-role infection rates. Sites recover at rate 1 regardless. The edge
// fields apply when the arrow's source is the current leftmost/rightmost
// occupied site; a singleton is both edges and both of its arrows point
// outward, so only the *_out fields apply to it.
struct BorderRule {
    double interior = 0.0;
    double left_edge_out = 0.0;
    double left_edge_in = 0.0;
    double right_edge_out = 0.0;
    double right_edge_in = 0.0;

    static BorderRule standard(double lambda_i, double lambda_e) {
        check(lambda_i, "lambda_i");
        check(lambda_e, "lambda_e");
        return {lambda_i, lambda_e, lambda_i, lambda_e, lambda_i};
    }

    // Boosted rates on arrows sourced at the rightmost site, base rate elsewhere.
    static BorderRule zeta(double lambda_base, double epsilon) {
        check(lambda_base, "lambda_base");
        check(epsilon, "epsilon");
        return {lambda_base, lambda_base, lambda_base, lambda_base + epsilon, lambda_base + epsilon};
    }

    static BorderRule classical(double lambda) {
        check(lambda, "lambda");
        return {lambda, lambda, lambda, lambda, lambda};
    }

    double max_rate() const {
        return std::max({interior, left_edge_out, left_edge_in, right_edge_out, right_edge_in});
    }

    // Rate applied to an arrow mark, given the source's role at the instant
    // before the mark. A rightward arrow from the rightmost site is outward;
    // from the leftmost (non-rightmost) site it points into the bulk.
    double transmission_rate(bool source_is_leftmost, bool source_is_rightmost, MarkKind kind) const {
        if (kind == MarkKind::arrow_right) {
            if (source_is_rightmost) return right_edge_out;
            if (source_is_leftmost) return left_edge_in;
            return interior;
        }
        if (source_is_leftmost) return left_edge_out;
        if (source_is_rightmost) return right_edge_in;
        return interior;
    }

    friend bool operator==(const BorderRule&, const BorderRule&) = default;

private:
    static void check(double rate, const char* name) {
        if (rate < 0.0) throw std::invalid_argument(std::string("BorderRule: negative rate ") + name);
    }
};

}  // namespace bcp
