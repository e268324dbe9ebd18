#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ctst {

// Process-wide worker cap, set once by the CLI --threads flag. 0 means
// "use hardware concurrency".
inline int& threads_setting() {
    static int n = 0;
    return n;
}

inline int default_threads() {
    const int n = threads_setting();
    if (n > 0) return n;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

inline void set_default_threads(int n) { threads_setting() = n; }

// Runs fn(i) for i in [begin, end) on up to `threads` workers. Work is split
// into contiguous chunks so results written to preallocated slots keep a
// deterministic layout regardless of thread count. The first exception thrown
// by any worker is rethrown on the caller.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    if (threads <= 0) threads = default_threads();
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ctst
