#pragma once

#include <functional>

namespace twistrec {

// Runs fn(begin, end, chunk_id) over [0, n) split into `threads` contiguous
// chunks. Chunk boundaries depend only on (n, threads); callers that merge
// integer counts per chunk in chunk order get results independent of the
// worker count.
void parallel_chunks(long n, int threads,
                     const std::function<void(long, long, int)>& fn);

}  // namespace twistrec
