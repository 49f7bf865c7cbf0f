#pragma once

#include <cstddef>
#include <functional>

namespace hornlab {

/// Worker count: HORNLAB_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(k) for k in [0, n) on up to worker_count() threads. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hornlab
