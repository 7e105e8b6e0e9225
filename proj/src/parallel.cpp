#include "mlqg/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mlqg {

std::size_t worker_count() {
  static const std::size_t count = [] {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("MLQG_THREADS");
    if (!env || !*env) return hw;
    try {
      const long v = std::stol(env);
      return v <= 0 ? hw : static_cast<std::size_t>(v);
    } catch (...) {
      return hw;
    }
  }();
  return count;
}

}  // namespace mlqg
