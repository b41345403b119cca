#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace nullhom {

// Runs body(i) for i in [0, n) over a static partition of worker threads.
// Workers write into disjoint per-index slots, so the result is identical
// for any thread count; reductions happen sequentially afterwards.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = threads;
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace nullhom
