#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace forge {

inline int default_worker_count() {
    unsigned int hardware = std::thread::hardware_concurrency();
    return hardware == 0 ? 1 : static_cast<int>(hardware);
}

/// Applies fn to every index in [0, count) on a bounded worker pool and
/// returns the results in index order, so output ordering never depends on
/// scheduling. fn must be thread-safe and must not throw; wrap failures in
/// the result type.
template <typename Fn>
auto parallel_map(std::size_t count, int workers, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
    using Result = decltype(fn(std::size_t{0}));
    std::vector<Result> results(count);
    if (count == 0) return results;
    if (workers <= 0) workers = default_worker_count();
    if (workers == 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= count) break;
            results[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    int thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
    return results;
}

} // namespace forge
