// parallel.hpp - static-partition parallel loop.
#pragma once

#include <cstddef>
#include <functional>

namespace ifm {

/// Number of workers to use when the caller passes 0.
unsigned default_thread_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Each index is visited exactly once; the first exception thrown by any
/// worker is rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ifm
