#pragma once

#include <cstddef>
#include <functional>

namespace gbpi {

// Honours GBPI_THREADS; at least 1.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gbpi
