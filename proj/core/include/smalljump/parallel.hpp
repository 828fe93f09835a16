#pragma once

#include <cstddef>
#include <functional>

namespace smalljump {

/// Worker count: `requested` when positive, else LEVY_THREADS, else the
/// hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested);

/// Calls body(i) for every i in [0, count) on up to `threads` workers. Work is
/// handed out through an atomic counter; callers write results by index so the
/// outcome does not depend on scheduling. The first exception is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace smalljump
