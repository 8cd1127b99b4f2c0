#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace bcp {

inline int effective_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(replica) for replica in [0, n). Replicas must be independent and
// write only to their own slots; results are then scheduling-invariant.
template <class Body>
void for_each_replica(int64_t n, int workers, Body&& body) {
    workers = effective_workers(workers);
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (int64_t r = 0; r < n; ++r) body(r);
        return;
    }
    std::atomic<int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const int64_t r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= n) return;
            body(r);
        }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<int64_t>(workers, n));
    pool.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace bcp
