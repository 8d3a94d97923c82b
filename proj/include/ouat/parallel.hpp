#pragma once

#include <cstddef>
#include <functional>

namespace ouat {

/// Worker count from ORLICZ_UAT_THREADS (0 or unset means hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index runs exactly once; callers write
/// results into slot i so the outcome does not depend on scheduling. The
/// first exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace ouat
