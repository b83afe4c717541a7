#pragma once

#include <cstddef>
#include <functional>

namespace stepsvm {

// Runs fn(0..n-1) on up to `threads` workers. Each index must be independent
// and write only to its own output slot, so the result is identical for any
// thread count. If several indices throw, the lowest-index exception is
// rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace stepsvm
