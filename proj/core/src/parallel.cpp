#include "slpants/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace slpants {

namespace {
std::atomic<int> g_override{0};
}

int thread_cap() {
    const int ov = g_override.load();
    if (ov > 0) return ov;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SLPANTS_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

void set_thread_override(int n) { g_override.store(n > 0 ? n : 0); }

void parallel_for(int n, const std::function<void(int)>& f) {
    const int threads = std::min(thread_cap(), std::max(n / 256, 1));
    if (threads <= 1) {
        for (int k = 0; k < n; ++k) f(k);
        return;
    }
    const int chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&f, lo, hi] {
            for (int k = lo; k < hi; ++k) f(k);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace slpants
