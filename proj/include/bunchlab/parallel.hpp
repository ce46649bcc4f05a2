#pragma once

#include <functional>

#include "bunchlab/types.hpp"

namespace bunchlab {

/// Worker count used by parallel loops: the BUNCHLAB_THREADS environment
/// variable if set (clamped to at least 1), otherwise the hardware
/// concurrency.
int worker_count();

/// Run fn(0), ..., fn(count - 1) across up to worker_count() threads.
/// Each index must write only to its own slot of any shared output, which
/// keeps results identical to a sequential run regardless of thread count.
/// The first exception thrown by any worker is rethrown to the caller.
void parallel_for(Index count, const std::function<void(Index)>& fn);

}  // namespace bunchlab
