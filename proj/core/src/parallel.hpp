#pragma once

#include <cstddef>
#include <functional>

namespace censbo::detail {

/// Resolves a requested worker count: 0 means hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Iterations
/// must be independent. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace censbo::detail
