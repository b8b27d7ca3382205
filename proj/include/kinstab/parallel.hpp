#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kinstab {

/// Worker count: KINSTAB_THREADS if set and positive, otherwise hardware concurrency.
inline int default_thread_count()
{
    if (const char* env = std::getenv("KINSTAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs body(i) for i in [0, count) on `threads` workers pulling indices from
/// a shared counter. The first exception thrown by any body is rethrown.
template <class Body>
void parallel_for(long count, int threads, Body&& body)
{
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const long i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= count) return;
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                        return;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace kinstab
