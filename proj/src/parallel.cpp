#include "fts/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fts {

namespace {

int default_threads() {
    if (const char* env = std::getenv("FTS_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& limit() {
    static std::atomic<int> v{0};
    return v;
}

}  // namespace

int max_threads() {
    const int v = limit().load(std::memory_order_relaxed);
    if (v >= 1) return v;
    static const int fallback = default_threads();
    return fallback;
}

void set_max_threads(int n) {
    limit().store(n >= 1 ? n : 0, std::memory_order_relaxed);
}

namespace detail {
bool& in_worker_flag() {
    thread_local bool flag = false;
    return flag;
}
}  // namespace detail

}  // namespace fts
