#pragma once

#include <cstddef>
#include <functional>

namespace gravcat {

/// Number of worker threads to use: `requested` when > 0, else the
/// GRAVCAT_THREADS environment variable, else the hardware concurrency
/// (minimum 1).
int resolve_threads(int requested);

/// Runs body(begin, end) over [0, n) split into fixed-size chunks handed to
/// `threads` workers. The chunking does not depend on the thread count, and
/// every chunk writes only its own output slots, so any computation whose
/// chunks are independent is bit-identical at every thread count.
/// Exceptions thrown by `body` are rethrown on the calling thread (first
/// chunk in index order wins).
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace gravcat
