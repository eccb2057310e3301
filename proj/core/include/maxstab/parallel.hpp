#pragma once

#include <cstddef>
#include <functional>

namespace maxstab {

/// Number of worker threads to use for a request; values <= 0 mean all cores.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results into index-addressed storage and
/// reduce afterwards in index order. If any call throws, the exception from
/// the smallest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace maxstab
