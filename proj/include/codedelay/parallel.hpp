#pragma once

#include <cstddef>
#include <functional>

namespace codedelay {

/// Worker threads for `tasks` independent jobs: hardware concurrency, capped by the
/// CODEDELAY_THREADS environment variable when it holds a positive integer.
unsigned worker_count(std::size_t tasks);

/// Calls fn(i) for i in [0, n) on up to worker_count(n) threads. Callers write results into
/// slot i of a presized container so output order never depends on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace codedelay
