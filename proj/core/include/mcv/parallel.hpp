#pragma once

#include <cstddef>
#include <functional>

namespace mcv {

/// Worker count from MCV_THREADS, else the hardware concurrency (>= 1).
unsigned default_threads();

/// Runs task(i) for i in [0, count) on up to `threads` workers
/// (0 = default_threads()). Tasks must write only to slots owned by their
/// index; the first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace mcv
