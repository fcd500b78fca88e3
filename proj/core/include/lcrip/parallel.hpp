#pragma once

#include <cstddef>
#include <functional>

namespace lcrip {

/// Worker count taken from LCRIP_WORKERS, or 1 when unset or invalid.
unsigned default_workers();

/// Runs body(i) for every i in [0, count) on up to `workers` threads.
///
/// Indices are split into contiguous chunks, one per thread. Bodies must
/// only write to per-index storage, so results never depend on the worker
/// count. The first exception thrown by any body is rethrown here.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace lcrip
