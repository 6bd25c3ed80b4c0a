#include "hycass/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hycass {

namespace {

int initial_cap() {
    const char* env = std::getenv("HYCASS_THREADS");
    if (env) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::atomic<int> g_cap{-1};

}  // namespace

int thread_cap() {
    int v = g_cap.load(std::memory_order_relaxed);
    if (v < 0) {
        v = initial_cap();
        g_cap.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_thread_cap(int n) {
    g_cap.store(std::max(1, n), std::memory_order_relaxed);
}

void parallel_for_ranges(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    int workers = std::min<int64_t>(thread_cap(), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int64_t begin = int64_t(w) * chunk;
        int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

void parallel_for(int64_t n, const std::function<void(int64_t)>& fn) {
    parallel_for_ranges(n, [&fn](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace hycass
