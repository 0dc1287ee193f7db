#pragma once

#include <cstddef>
#include <functional>

namespace corrscreen {

// Worker count used when a caller passes 0: CORRSCREEN_THREADS if set,
// otherwise std::thread::hardware_concurrency().
std::size_t default_worker_count();

// Runs body(i) for every i in [0, count). Each index is visited exactly once;
// callers store per-index results in preallocated slots and reduce in index
// order afterwards, so output never depends on scheduling. The first
// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace corrscreen
