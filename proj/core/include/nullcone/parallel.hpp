#pragma once

#include <cstddef>
#include <functional>

namespace nullcone {

// Worker-thread cap. Reads NULLCONE_THREADS once; defaults to the hardware
// concurrency clamped to [1, 16].
int max_threads();

// Runs fn(i) for i in [0, n). Partitions the index range over at most
// max_threads() workers. Bodies must write only to disjoint slots; results are
// then independent of the thread count, which keeps outputs deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nullcone
