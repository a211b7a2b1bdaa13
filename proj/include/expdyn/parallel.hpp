#pragma once

#include <cstddef>
#include <functional>

namespace expdyn {

// EXPDYN_THREADS if set and positive, else the machine's parallelism.
int worker_count();

// Calls body(begin, end) over static contiguous chunks of [0, n). Results must
// be written to disjoint per-index slots so output does not depend on workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  int workers = 0);

}  // namespace expdyn
