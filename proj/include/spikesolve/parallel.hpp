#pragma once

#include <cstddef>
#include <functional>

namespace spikesolve {

/// Worker cap from SPIKESOLVE_THREADS (>=1), defaulting to the hardware
/// concurrency.
int max_threads();

/// Runs fn(i) for i in [0, n). Chunked across threads when more than one
/// worker is allowed; writers must address disjoint state by index so the
/// result is schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace spikesolve
