#pragma once

#include <cstddef>
#include <functional>

namespace icrb {

/**
 * @brief Run body(i) for i in [0, n) on up to @p jobs threads.
 *
 * Work is handed out by an atomic counter; any partitioning is fine
 * because callers write into per-index slots and reduce in index order
 * afterwards. jobs <= 1 runs inline. The first exception thrown by any
 * body is rethrown on the calling thread after all workers join.
 */
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& body);

/// hardware_concurrency clamped to >= 1.
unsigned default_jobs();

} // namespace icrb
