#include "mkmimo/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mkmimo {

unsigned worker_count() {
  if (const char* env = std::getenv("MKMIMO_WORKERS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1 && parsed <= 1024) {
      return static_cast<unsigned>(parsed);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1;
}

void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned workers,
                  const std::function<void(std::uint64_t)>& body) {
  if (end <= begin) {
    return;
  }
  const std::uint64_t count = end - begin;
  if (workers < 1) {
    workers = 1;
  }
  if (static_cast<std::uint64_t>(workers) > count) {
    workers = static_cast<unsigned>(count);
  }
  if (workers == 1) {
    for (std::uint64_t i = begin; i < end; ++i) {
      body(i);
    }
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = begin + chunk * w;
    const std::uint64_t hi = lo + chunk < end ? lo + chunk : end;
    if (lo >= hi) {
      break;
    }
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::uint64_t i = lo; i < hi; ++i) {
          body(i);
        }
      } catch (...) {
        const std::scoped_lock lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

void parallel_for(std::uint64_t begin, std::uint64_t end,
                  const std::function<void(std::uint64_t)>& body) {
  parallel_for(begin, end, worker_count(), body);
}

}  // namespace mkmimo
