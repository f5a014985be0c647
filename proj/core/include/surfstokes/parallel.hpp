#pragma once

#include <functional>

namespace surfstokes {

/// Number of worker threads to use: min(SURFSTOKES_THREADS, hardware cores),
/// at least 1. SURFSTOKES_THREADS unset means all cores.
int thread_budget();

/// Runs fn(i) for i in [0, n), chunked over `threads` workers (0 = budget).
/// Callers must write results to preallocated per-index slots; with that
/// discipline the outcome is bit-identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

}  // namespace surfstokes
