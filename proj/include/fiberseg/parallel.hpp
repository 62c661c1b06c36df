#pragma once

#include <cstddef>
#include <functional>

namespace fiberseg {

// Worker count: FIBERSEG_THREADS if set and > 0, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, count). Work is split into contiguous chunks, one
// per worker; fn must only write state owned by index i so that results are
// identical for any thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fiberseg
