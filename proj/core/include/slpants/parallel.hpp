#pragma once

#include <functional>

namespace slpants {

// Concurrency cap: min(hardware threads, SLPANTS_THREADS when set and > 0).
int thread_cap();
// Test hook; n <= 0 restores the environment-derived cap.
void set_thread_override(int n);

// Runs f(k) for k in [0, n). Work is chunked contiguously; every f(k) must
// write only slot k of its outputs, which keeps results bitwise independent
// of the thread count.
void parallel_for(int n, const std::function<void(int)>& f);

} // namespace slpants
