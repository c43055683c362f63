#include "graphent/parallel.hpp"

#include <cstdlib>
#include <string>

namespace graphent {

unsigned worker_count() {
  static const unsigned count = [] {
    if (const char* env = std::getenv("GRAPHENT_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
  }();
  return count;
}

}  // namespace graphent
