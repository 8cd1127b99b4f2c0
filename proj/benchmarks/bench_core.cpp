#include <benchmark/benchmark.h>

#include "bcp/dynamics.hpp"
#include "bcp/estimators.hpp"
#include "bcp/event_log.hpp"
#include "bcp/exact.hpp"
#include "bcp/philox.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
    uint64_t index = 0;
    for (auto _ : state) {
        auto b = bcp::stream_block(0x1234, 42, 1, index++);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_PhiloxBlock);

void BM_SubstreamMarks(benchmark::State& state) {
    bcp::SubstreamCursor cur(99, 0, bcp::MarkKind::arrow_right, 2.0);
    for (auto _ : state) {
        auto m = cur.pop();
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_SubstreamMarks);

void BM_MakeLog(benchmark::State& state) {
    const int64_t width = state.range(0);
    for (auto _ : state) {
        auto log = bcp::make_log({0, width - 1}, 50.0, 2.0, 7);
        benchmark::DoNotOptimize(log);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(width * 50 * 5));
}
BENCHMARK(BM_MakeLog)->Arg(16)->Arg(64);

void BM_EvolveMaterialized(benchmark::State& state) {
    const auto log = bcp::make_log({0, 29}, 50.0, 2.6, 11);
    const auto rule = bcp::BorderRule::standard(1.6, 2.6);
    const auto init = bcp::Configuration::finite(log.window, {14, 15});
    const double times[] = {50.0};
    for (auto _ : state) {
        auto traj = bcp::evolve(init, log, rule, times);
        benchmark::DoNotOptimize(traj);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(log.marks.size()));
}
BENCHMARK(BM_EvolveMaterialized);

// Marks per second through the sliding-window engine is the throughput number
// that bounds every estimator.
void BM_AnchoredReplay(benchmark::State& state) {
    const int64_t depth = state.range(0);
    const auto rule = bcp::BorderRule::standard(1.65, 2.65);
    const auto init = bcp::Configuration::all_left_of(0, depth);
    const double horizon = 20.0;
    uint64_t seed = 0;
    for (auto _ : state) {
        auto traj = bcp::evolve_anchored(init, rule, depth, horizon, ++seed, {});
        benchmark::DoNotOptimize(traj);
    }
    const double per_site_rate = 1.0 + 2.0 * rule.max_rate();
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(horizon * per_site_rate * static_cast<double>(depth)));
}
BENCHMARK(BM_AnchoredReplay)->Arg(50)->Arg(200)->Arg(400);

void BM_Uniformization(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto gen = bcp::exact::build_generator(n, bcp::BorderRule::standard(1.0, 1.5));
    const auto init = bcp::exact::DistributionVector::point_mass(n, 1u << (n / 2));
    for (auto _ : state) {
        auto out = bcp::exact::transient(gen, init, 5.0);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Uniformization)->Arg(6)->Arg(10)->Arg(12);

void BM_SurvivalReplica(benchmark::State& state) {
    const auto rule = bcp::BorderRule::standard(1.65, 2.65);
    uint64_t seed = 0;
    for (auto _ : state) {
        auto r = bcp::estimate_theta(rule, 50.0, 1, ++seed, 1);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_SurvivalReplica);

}  // namespace

BENCHMARK_MAIN();
