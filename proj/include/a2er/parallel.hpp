#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace a2er {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) across up to `threads` workers. Work items
// must be independent; determinism is the callee's business (index-derived
// RNG streams).
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& fn) {
    const int n_threads = std::min<std::int64_t>(resolve_threads(threads), count);
    if (n_threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::int64_t i = t; i < count; i += n_threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace a2er
