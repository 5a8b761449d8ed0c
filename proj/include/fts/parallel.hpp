#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace fts {

/// Maximum worker threads for parallel loops. Defaults to the hardware
/// concurrency; the FTS_THREADS environment variable overrides the default.
int max_threads();

/// Sets the worker limit. 0 restores the default.
void set_max_threads(int n);

namespace detail {
bool& in_worker_flag();
}

/// Runs body(state, i) for i in [0, n). Each worker constructs its own state
/// once via make_state() and reuses it across iterations. Iterations must be
/// independent; results must be written to per-index slots so the outcome is
/// identical for any thread count. Nested calls degrade to serial execution.
template <class StateFactory, class Body>
void parallel_for_indexed(int n, StateFactory make_state, Body body) {
    if (n <= 0) return;
    const int workers = std::min(max_threads(), n);
    if (workers <= 1 || detail::in_worker_flag()) {
        auto state = make_state();
        for (int i = 0; i < n; ++i) body(state, i);
        return;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;

    auto work = [&]() {
        detail::in_worker_flag() = true;
        try {
            auto state = make_state();
            for (;;) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n || failed.load(std::memory_order_relaxed)) break;
                body(state, i);
            }
        } catch (...) {
            if (!error_claimed.test_and_set()) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
        detail::in_worker_flag() = false;
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <class Body>
void parallel_for(int n, Body body) {
    parallel_for_indexed(
        n, [] { return 0; }, [&](int&, int i) { body(i); });
}

}  // namespace fts
