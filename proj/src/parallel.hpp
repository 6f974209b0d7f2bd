#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mindiv {

// Global cap on worker threads; 0 means use hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(block_index) for block_index in [0, n_blocks). Blocks are a fixed
// partition of the work, so per-block results combined in index order are
// identical for any thread count.
inline void parallel_for_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = max_threads();
    if (hw <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, n_blocks));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t b = t; b < n_blocks; b += nthreads) fn(b);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace mindiv
