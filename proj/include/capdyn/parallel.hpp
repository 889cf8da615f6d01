#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace capdyn {

/// Effective worker count: explicit request, else the CAPDYN_THREADS
/// environment variable, else the hardware concurrency.
int resolve_threads(int requested);

/// Run `body(i)` for i in [0, n) on a shared-counter work queue.
/// Each index is claimed exactly once; callers write results into
/// index-addressed slots, so the outcome does not depend on the number of
/// workers or on completion order.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
    const int workers = resolve_threads(threads);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const auto pool_size = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(pool_size);
    for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace capdyn
