#pragma once

#include <cstddef>
#include <functional>

namespace logikon {

// Worker count: hardware concurrency capped by LOGIKON_THREADS when set.
std::size_t worker_count();

// Calls fn(i) for i in [0, n). Work is split into contiguous blocks, so
// results written by index are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace logikon
