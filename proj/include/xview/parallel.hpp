#pragma once

#include <cstdint>
#include <functional>

namespace xview {

/// requested > 0 passes through; anything else resolves to the hardware thread count
/// (at least 1).
int resolve_workers(int requested);

/// Splits [begin, end) into at most `workers` contiguous chunks and runs
/// body(chunk_begin, chunk_end) on one thread per chunk. Bodies that only write to
/// slots derived from their own index range produce results identical to a serial run.
void parallel_for(std::int64_t begin, std::int64_t end, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace xview
