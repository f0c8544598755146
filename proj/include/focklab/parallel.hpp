#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace focklab {

/// Worker count used by parallel_for; 1 by default.
int thread_count();
/// n <= 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);

/// Calls f(i) for i in [0, n) on contiguous static chunks. Results must not depend on the
/// chunking: callers write per-index outputs and reduce them serially.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
    if (workers == 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace focklab
