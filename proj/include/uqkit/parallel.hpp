#pragma once

#include <cstddef>
#include <functional>

namespace uqkit {

/// Worker count used when a caller passes 0: the UQKIT_THREADS environment
/// variable if set to a positive integer, otherwise the hardware concurrency.
unsigned default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = default).
/// Each index runs exactly once; the first exception thrown is rethrown on the
/// calling thread after all workers stop.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace uqkit
