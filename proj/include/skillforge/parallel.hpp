#pragma once

#include <cstddef>
#include <functional>

namespace skillforge {

/// Worker cap from SKILLFORGE_THREADS (0 or unset = hardware concurrency).
[[nodiscard]] std::size_t thread_count();

/// Runs fn(0..n-1) on up to thread_count() threads. Each index runs exactly
/// once; the first exception thrown is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace skillforge
