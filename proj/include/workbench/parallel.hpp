// Bounded worker pool for independent per-degree work; results are merged by index.
#pragma once

#include <cstddef>
#include <functional>

namespace wb {

// WORKBENCH_THREADS when set and positive, otherwise 1.
unsigned configured_threads();
// Overrides the environment for the current process (0 restores it).
void set_thread_override(unsigned n);

// Calls f(i) for i in [0, n); every index runs exactly once, on up to configured_threads() threads.
// The first exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace wb
