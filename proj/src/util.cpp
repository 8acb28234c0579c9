#include "capstokes/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace capstokes {

int worker_count() {
  if (const char* env = std::getenv("CAPSTOKES_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return std::max(1, std::min<int>(hw == 0 ? 1 : static_cast<int>(hw), 8));
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_ranges(int n, const std::function<void(int, int)>& fn) {
  const int workers = inside_parallel_region ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      inside_parallel_region = true;
      fn(begin, end);
      inside_parallel_region = false;
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace capstokes
