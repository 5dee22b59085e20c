#include "blwave/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace blwave {

namespace {

int env_threads() {
    if (const char* s = std::getenv("BL_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) return n;
    }
    return 1;
}

std::atomic<int>& thread_count() {
    static std::atomic<int> n{env_threads()};
    return n;
}

}  // namespace

int num_threads() { return thread_count().load(); }

void set_num_threads(int n) { thread_count().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t t = std::min<std::size_t>(std::size_t(num_threads()), n / 4096 + 1);
    if (t <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t i = 1; i < t; ++i) {
        const std::size_t lo = i * chunk, hi = std::min(n, lo + chunk);
        if (lo < hi) pool.emplace_back(body, lo, hi);
    }
    body(0, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

}  // namespace blwave
