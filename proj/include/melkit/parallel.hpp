#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace melkit {

// Runs fn(0..n-1) over hardware threads in contiguous chunks. Results must
// be written to disjoint slots so the outcome is schedule-independent. The
// first exception thrown by any worker is rethrown on the caller.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    const size_t workers =
        std::min<size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    const size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        const size_t lo = w * chunk;
        const size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &error, &failed] {
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace melkit
