#pragma once

#include <cstddef>
#include <functional>

namespace rankspectra {

/// Resolves a requested worker count. Zero means "auto": the
/// RANKSPECTRA_THREADS environment variable if set, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Splits [0, count) into at most `threads` contiguous blocks and runs
/// body(begin, end) for each on its own thread. Callers write to disjoint
/// slots, so results never depend on the worker count. The first exception
/// thrown by any block is rethrown on the calling thread.
void parallel_blocks(std::size_t count, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body);

inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
    parallel_blocks(count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

} // namespace rankspectra
