/// @file parallel.hpp
/// @brief Bounded worker pool for independent jobs with results kept in index
/// order, so output never depends on scheduling.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kslg {

/// KSLG_THREADS if set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_limit();

/// Calls job(i) for i in [0, n) on at most `workers` threads. The first
/// exception thrown by any job is rethrown after all threads have joined.
template <class Job>
void parallel_for(std::size_t n, std::size_t workers, Job&& job) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kslg
