#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mlqg {

/// Worker cap from MLQG_THREADS (0 or unset: hardware concurrency).
std::size_t worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write
/// disjoint outputs, so results do not depend on the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, n / 1024));
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace mlqg
