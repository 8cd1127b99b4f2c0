#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "bcp/event_log.hpp"
#include "bcp/philox.hpp"
#include "bcp/stats.hpp"

using namespace bcp;

TEST_CASE("philox4x32-10 known answers") {
    // Reference vectors from the original generator's test suite.
    auto zero = philox::block({0, 0, 0, 0}, 0u, 0u);
    CHECK(zero == philox::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    auto ones = philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, 0xffffffffu, 0xffffffffu);
    CHECK(ones == philox::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    auto pi = philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, 0xa4093822u, 0x299f31d0u);
    CHECK(pi == philox::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("derived seeds differ across indices") {
    const uint64_t s = 0x1234'5678'9abc'def0ull;
    CHECK(derive_seed(s, 0) != derive_seed(s, 1));
    CHECK(derive_seed(s, 0, 1) != derive_seed(s, 0, 2));
    CHECK(derive_seed(s, 3) == derive_seed(s, 3));
}

TEST_CASE("make_log validates arguments") {
    CHECK_THROWS_AS(make_log({0, 5}, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_log({0, 5}, -2.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_log({0, 5}, 1.0, -0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_log({5, 0}, 1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("recovery-only log has roughly horizon-many marks on one site") {
    const double horizon = 10000.0;
    const EventLog log = make_log({0, 0}, horizon, 0.0, 42);
    for (const Mark& m : log.marks) {
        CHECK(m.kind == MarkKind::recovery);
        CHECK(m.site == 0);
        CHECK(m.time > 0.0);
        CHECK(m.time <= horizon);
    }
    const double n = static_cast<double>(log.marks.size());
    CHECK(std::abs(n - horizon) < 4.0 * std::sqrt(horizon));
}

TEST_CASE("logs are deterministic in their arguments") {
    const EventLog a = make_log({-3, 7}, 50.0, 1.5, 99);
    const EventLog b = make_log({-3, 7}, 50.0, 1.5, 99);
    REQUIRE(a.marks.size() == b.marks.size());
    for (size_t i = 0; i < a.marks.size(); ++i) {
        CHECK(a.marks[i].time == b.marks[i].time);
        CHECK(a.marks[i].site == b.marks[i].site);
        CHECK(a.marks[i].kind == b.marks[i].kind);
    }
    const EventLog c = make_log({-3, 7}, 50.0, 1.5, 100);
    CHECK(a.marks.size() != c.marks.size());  // different seed, different realization
}

TEST_CASE("marks are strictly time ordered") {
    const EventLog log = make_log({0, 20}, 100.0, 2.0, 7);
    for (size_t i = 1; i < log.marks.size(); ++i) CHECK(log.marks[i - 1].time < log.marks[i].time);
}

TEST_CASE("substream stability under window and horizon extension") {
    const uint64_t seed = 2024;
    const EventLog small = make_log({0, 10}, 100.0, 2.0, seed);
    const EventLog wide = make_log({0, 20}, 100.0, 2.0, seed);
    const EventLog tall = make_log({0, 10}, 250.0, 2.0, seed);

    const auto small_marks = merge_view(small, {0, 10}, 0.0, 100.0);
    const auto wide_restricted = merge_view(wide, {0, 10}, 0.0, 100.0);
    REQUIRE(small_marks.size() == wide_restricted.size());
    for (size_t i = 0; i < small_marks.size(); ++i) {
        CHECK(small_marks[i].time == wide_restricted[i].time);
        CHECK(small_marks[i].site == wide_restricted[i].site);
        CHECK(small_marks[i].kind == wide_restricted[i].kind);
        if (small_marks[i].has_level()) CHECK(small_marks[i].level == wide_restricted[i].level);
    }

    const auto tall_restricted = merge_view(tall, {0, 10}, 0.0, 100.0);
    REQUIRE(small_marks.size() == tall_restricted.size());
    for (size_t i = 0; i < small_marks.size(); ++i) {
        CHECK(small_marks[i].time == tall_restricted[i].time);
        CHECK(small_marks[i].site == tall_restricted[i].site);
    }
}

TEST_CASE("merge_view restriction semantics") {
    const EventLog log = make_log({0, 5}, 20.0, 1.0, 11);

    SUBCASE("full view is the whole sequence") {
        const auto all = merge_view(log, log.window, 0.0, log.horizon);
        CHECK(all.size() == log.marks.size());
    }
    SUBCASE("partition over time re-assembles the sequence") {
        const auto first = merge_view(log, log.window, 0.0, 7.0);
        const auto second = merge_view(log, log.window, 7.0, 20.0);
        CHECK(first.size() + second.size() == log.marks.size());
        std::vector<Mark> glued = first;
        glued.insert(glued.end(), second.begin(), second.end());
        for (size_t i = 0; i < glued.size(); ++i) CHECK(glued[i].time == log.marks[i].time);
    }
    SUBCASE("bad ranges are rejected") {
        CHECK_THROWS_AS(merge_view(log, {0, 9}, 0.0, 10.0), std::out_of_range);
        CHECK_THROWS_AS(merge_view(log, {0, 5}, 5.0, 25.0), std::out_of_range);
        CHECK_THROWS_AS(merge_view(log, {0, 5}, 5.0, 5.0), std::out_of_range);
    }
}

TEST_CASE("is_open thresholds and monotonicity") {
    Mark arrow{1.0, 0, MarkKind::arrow_right, 0.3};
    CHECK(is_open(arrow, 0.5));
    CHECK_FALSE(is_open(arrow, 0.0));
    CHECK_FALSE(is_open(arrow, 0.3));

    Mark recovery{1.0, 0, MarkKind::recovery, 0.0};
    CHECK_THROWS_AS(is_open(recovery, 0.5), std::invalid_argument);

    const EventLog log = make_log({0, 4}, 50.0, 2.0, 5);
    for (const Mark& m : log.marks) {
        if (!m.has_level()) continue;
        for (double lo : {0.1, 0.7, 1.3}) {
            if (is_open(m, lo)) CHECK(is_open(m, lo + 0.5));
        }
    }
}

TEST_CASE("substream statistics pass KS at 1e-3") {
    const uint64_t seed = 31337;
    const double lambda_max = 1.7;
    const size_t n = 100000;

    auto interarrivals = [&](MarkKind kind) {
        SubstreamCursor cur(seed, 12, kind, lambda_max);
        std::vector<double> gaps;
        gaps.reserve(n);
        double prev = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const Mark m = cur.pop();
            gaps.push_back(m.time - prev);
            prev = m.time;
        }
        return gaps;
    };

    CHECK(stats::ks_test_exponential(interarrivals(MarkKind::recovery), 1.0) > 1e-3);
    CHECK(stats::ks_test_exponential(interarrivals(MarkKind::arrow_right), lambda_max) > 1e-3);
    CHECK(stats::ks_test_exponential(interarrivals(MarkKind::arrow_left), lambda_max) > 1e-3);

    SubstreamCursor cur(seed, -4, MarkKind::arrow_left, lambda_max);
    std::vector<double> levels;
    levels.reserve(n);
    for (size_t i = 0; i < n; ++i) levels.push_back(cur.pop().level);
    CHECK(stats::ks_test_uniform(levels, 0.0, lambda_max) > 1e-3);
}

TEST_CASE("binary dump round-trips") {
    const EventLog log = make_log({-2, 3}, 25.0, 1.2, 77);
    std::stringstream buf;
    dump_log(log, buf);
    const EventLog back = load_log(buf);
    CHECK(back.seed == log.seed);
    CHECK(back.window == log.window);
    CHECK(back.horizon == log.horizon);
    CHECK(back.lambda_max == log.lambda_max);
    REQUIRE(back.marks.size() == log.marks.size());
    for (size_t i = 0; i < log.marks.size(); ++i) {
        CHECK(back.marks[i].time == log.marks[i].time);
        CHECK(back.marks[i].site == log.marks[i].site);
        CHECK(back.marks[i].kind == log.marks[i].kind);
        if (log.marks[i].has_level()) CHECK(back.marks[i].level == log.marks[i].level);
    }
}
