#pragma once

#include <cstddef>
#include <functional>

namespace krein {

/// Worker count: KREIN_THREADS when set (>= 1), otherwise hardware concurrency.
std::size_t configured_threads();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// thread, so callers that write results into slot i get output independent
/// of the thread count. Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace krein
