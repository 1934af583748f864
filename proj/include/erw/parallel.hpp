#pragma once

// Deterministic work distribution over run indices. Each run's randomness
// comes only from its own stream index, so results never depend on how runs
// land on threads; workers keep one reusable state object each.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erw {

inline int resolve_thread_count(int requested, std::int64_t n_runs) {
    int n = requested;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::max<std::int64_t>(
        1, std::min<std::int64_t>(n, n_runs)));
}

template <class MakeState, class Body>
void parallel_runs(std::int64_t n_runs, int threads, MakeState&& make_state,
                   Body&& body) {
    const int n_threads = resolve_thread_count(threads, n_runs);
    if (n_threads == 1) {
        auto state = make_state();
        for (std::int64_t i = 0; i < n_runs; ++i) body(state, i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&] {
        try {
            auto state = make_state();
            while (true) {
                const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n_runs) break;
                body(state, i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(err_mu);
            if (!first_error) first_error = std::current_exception();
            next.store(n_runs);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace erw
