#pragma once

#include <cstdint>
#include <functional>

namespace mkmimo {

// Worker count used by Monte Carlo loops: the MKMIMO_WORKERS environment
// variable when set to a positive integer, otherwise the hardware thread
// count. Always at least 1.
unsigned worker_count();

// Runs body(i) for every i in [begin, end), split into contiguous blocks
// across the given number of workers. Bodies run concurrently and must write
// only to disjoint slots; the first exception thrown by any worker is
// rethrown on the calling thread after all workers join.
void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned workers,
                  const std::function<void(std::uint64_t)>& body);

// Same, with workers = worker_count().
void parallel_for(std::uint64_t begin, std::uint64_t end,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace mkmimo
