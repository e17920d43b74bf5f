#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mesonbell {

inline unsigned default_worker_count() noexcept {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, count) on up to `workers` threads, each thread
/// owning one contiguous block. The first exception thrown by any block is
/// rethrown on the calling thread after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = default_worker_count()) {
    if (count == 0) return;
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (count + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace mesonbell
