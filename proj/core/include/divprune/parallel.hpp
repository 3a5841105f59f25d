#ifndef DIVPRUNE_PARALLEL_HPP
#define DIVPRUNE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace divprune {

// Worker cap: DIVPRUNE_THREADS if set, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on contiguous chunks. Each index writes only its
// own output slot, so results are schedule-independent. The first exception
// is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace divprune

#endif
