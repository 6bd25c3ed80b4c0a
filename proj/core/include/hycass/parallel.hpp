#pragma once

#include <cstdint>
#include <functional>

namespace hycass {

/// Worker cap for parallel_for. Defaults to the HYCASS_THREADS environment
/// variable, else 1. Results are bit-identical for any cap: parallel loops
/// only ever write disjoint outputs.
int thread_cap();
void set_thread_cap(int n);

/// Runs fn(i) for i in [0, n). Splits into contiguous chunks across at most
/// thread_cap() threads when n is large enough to be worth it.
void parallel_for(int64_t n, const std::function<void(int64_t)>& fn);

/// Chunked variant: fn(begin, end) over disjoint ranges.
void parallel_for_ranges(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

}  // namespace hycass
