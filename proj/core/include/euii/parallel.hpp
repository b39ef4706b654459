#pragma once

#include <cstddef>
#include <functional>

namespace euii {

/// Number of worker threads to use: `requested` if non-zero, otherwise the
/// hardware concurrency (at least 1).
unsigned resolve_workers(unsigned requested);

/// Runs task(i) for every i in [0, count) on `workers` threads. Tasks are
/// handed out dynamically, so the callee must write results to slot i and
/// never depend on execution order. The first exception thrown by a task is
/// rethrown on the calling thread after all workers have stopped.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace euii
