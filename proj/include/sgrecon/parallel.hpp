#pragma once

#include <functional>

namespace sgrecon {

/// Worker count resolved from the SGRECON_THREADS environment variable:
/// unset or "0" means hardware concurrency, any positive value is taken
/// literally. Always at least 1.
int worker_count();

/// Runs fn(i) for i in [begin, end), splitting the range into contiguous
/// chunks across worker_count() threads. Falls back to a serial loop for
/// small ranges or a single worker. fn must not throw.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace sgrecon
