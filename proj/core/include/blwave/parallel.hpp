#pragma once

#include <cstddef>
#include <functional>

namespace blwave {

// Process-wide worker count for elementwise loops. Defaults to 1; BL_THREADS
// is read once on first use. Work is split into fixed contiguous chunks and
// no loop performs a reduction, so results do not depend on the count.
int num_threads();
void set_num_threads(int n);

void parallel_for(std::size_t n, const std::function<void(std::size_t lo, std::size_t hi)>& body);

}  // namespace blwave
