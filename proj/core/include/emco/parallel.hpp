#pragma once

#include <cstddef>
#include <functional>

namespace emco {

// Number of worker threads to use when the caller passes 0: the EMCO_THREADS
// environment variable if set, otherwise std::thread::hardware_concurrency().
unsigned default_threads();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Tasks must be
// independent; each writes its own output slot, so results do not depend on
// scheduling. threads == 0 resolves via default_threads(); threads == 1 runs
// inline. Exceptions from tasks are rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace emco
