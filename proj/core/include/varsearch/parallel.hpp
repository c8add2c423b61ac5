#pragma once

#include <cstddef>
#include <functional>

namespace varsearch {

/// Runs body(i) for i in [0, count) on up to `workers` threads.
///
/// Indices are split into contiguous blocks; each body call must write only
/// to state owned by index i, which keeps results independent of the worker
/// count. The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace varsearch
