#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tpk {

/// Upper bound on worker threads used by the O(n^2) kernels.
/// Defaults to TPK_THREADS if set, otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for i in [0, n). Each index is visited exactly once; callers
/// write to disjoint slots so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed-tree pairwise summation. The tree depends only on values.size().
double pairwise_sum(std::span<const double> values);

}  // namespace tpk
