#pragma once

#include <functional>

namespace kinred {

/// Worker count used by `parallel_for`; 0 selects hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/**
 * Runs body(i) for i in [0, n) split into contiguous chunks. Each index is
 * handled exactly once and results must go to index-owned slots, so output
 * does not depend on the thread count. If bodies throw, the exception from
 * the lowest failing index is rethrown.
 */
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace kinred
