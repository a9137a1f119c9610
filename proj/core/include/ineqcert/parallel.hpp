#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ineqcert {

/// Worker count, capped by INEQ_CERTIFY_THREADS when set.
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the worker count; callers write into per-index slots
/// and reduce afterwards so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (tree) summation; fixed order for reproducible reductions.
double pairwise_sum(std::span<const double> values);

}  // namespace ineqcert
