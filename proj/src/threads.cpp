#include "turntaker/threads.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace turntaker {

int worker_thread_count() {
#ifdef _OPENMP
  int count = omp_get_max_threads();
#else
  int count = 1;
#endif
  if (const char* cap = std::getenv("TURNTAKER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v >= 1 && v < count) {
      count = static_cast<int>(v);
    }
  }
  return count >= 1 ? count : 1;
}

}  // namespace turntaker
