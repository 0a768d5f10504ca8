#include "gridlocus/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace gridlocus {

int thread_count(int work_items, int default_cap) {
  int cap = default_cap > 0 ? default_cap : omp_get_max_threads();
  if (const char* env = std::getenv("GRIDLOCUS_THREADS")) {
    int requested = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, requested);
    if (ec == std::errc{} && ptr == end && requested > 0) cap = requested;
  }
  return std::max(1, std::min(cap, work_items));
}

}  // namespace gridlocus
