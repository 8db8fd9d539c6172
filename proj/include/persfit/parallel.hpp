#pragma once

#include <cstdint>
#include <functional>

namespace persfit {

// Number of worker threads: hardware concurrency, capped by the
// PERSFIT_THREADS environment variable when set.
int num_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; each item
// writes only to its own output slot so results do not depend on the
// schedule. Executes inline when n is small or a single thread is requested.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)> &fn);

} // namespace persfit
