#pragma once

#include <functional>

namespace capstokes {

// Worker cap: CAPSTOKES_THREADS if set, otherwise min(hardware threads, 8).
int worker_count();

// Runs fn(begin, end) over a partition of [0, n). Nested calls run serially,
// and results must not depend on the partitioning (disjoint writes only).
void parallel_ranges(int n, const std::function<void(int, int)>& fn);

}  // namespace capstokes
