#pragma once

#include <cstddef>
#include <functional>

namespace hitchin {

/// Worker count: HITCHIN_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n). The first exception thrown by any task is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hitchin
