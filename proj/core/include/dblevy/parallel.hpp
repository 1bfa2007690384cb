#pragma once

#include <functional>

namespace dblevy {

/// Worker count: DBLEVY_THREADS when set, else hardware concurrency, clamped
/// to [1, 16].
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() workers. Exceptions are
/// captured and the first one rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace dblevy
