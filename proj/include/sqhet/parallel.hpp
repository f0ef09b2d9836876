#pragma once

#include <cstddef>
#include <functional>

namespace sqhet {

/// Worker count from SQHET_WORKERS, else hardware concurrency (>= 1).
std::size_t default_workers();

/// Calls body(i) for i in [0, n) on up to `workers` threads. Bodies must
/// write only to disjoint, index-addressed outputs; callers reduce in index
/// order afterwards so results never depend on the worker count.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace sqhet
