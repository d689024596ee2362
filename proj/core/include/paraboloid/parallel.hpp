#pragma once

#include <cstddef>
#include <functional>

namespace paraboloid {

// Number of workers used by parallel_for. Reads PARABOLOID_WORKERS once;
// falls back to std::thread::hardware_concurrency().
std::size_t worker_count();

// Overrides the worker count for the rest of the process (0 restores the
// environment/hardware default).
void set_worker_count(std::size_t workers);

// Calls body(i) for every i in [0, count). Work is split into contiguous
// chunks, one per worker. Each index must write only to its own output slot;
// reductions are done by the caller afterwards in index order, which keeps
// results bitwise independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace paraboloid
