#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace pottslab {

/// 0 means "use std::thread::hardware_concurrency()".
unsigned resolve_workers(unsigned requested) noexcept;

/// Splits [0, count) into `chunks` contiguous ranges of near-equal size and
/// runs `body(chunk, begin, end)` on up to `workers` threads. Chunk boundaries
/// depend only on (count, chunks), so callers that reduce per-chunk results in
/// chunk order get output independent of the worker count.
void parallel_chunks(std::uint64_t count, std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body);

}  // namespace pottslab
