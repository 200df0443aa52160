#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace trunctest {

/// Runs fn(i) for i in [0, count) on `workers` threads. Work is handed out by
/// an atomic counter; each index sees the same inputs no matter how many
/// workers run, so any output keyed by index is reproducible. workers <= 1
/// runs inline.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const auto nthreads = static_cast<std::size_t>(workers) < count
                              ? static_cast<std::size_t>(workers)
                              : count;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

}  // namespace trunctest
