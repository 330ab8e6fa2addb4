#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace bolab {

/// Runs fn(i) for i in [0, count) across `workers` threads. Work item i always
/// computes the same value regardless of the worker count; callers must write
/// into per-index slots.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

int default_workers();

/// Fixed-shape pairwise tree sum; the result is independent of how the inputs
/// were produced (and of the worker count that produced them).
double pairwise_sum(const std::vector<double>& values);

}  // namespace bolab
