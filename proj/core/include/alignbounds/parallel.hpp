#pragma once

#include <cstddef>
#include <functional>

namespace alignbounds {

// Worker budget: ALIGNBOUNDS_THREADS when set to a positive integer,
// hardware concurrency otherwise. Read once per process.
std::size_t thread_budget();

// Runs fn(0) .. fn(count-1) across the worker budget. Each index owns its
// output slot and seeds, so results are identical for any budget. The first
// exception thrown by a worker is rethrown after the pool joins.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn);

}  // namespace alignbounds
