#include "twistrec/runner.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace twistrec {

void parallel_chunks(long n, int threads,
                     const std::function<void(long, long, int)>& fn) {
  if (threads < 1) threads = 1;
  if (n <= 0) return;
  // Chunk layout is a pure function of n alone so results cannot depend on
  // the thread count: fixed 64 slices (or fewer for tiny n).
  int slices = n < 64 ? int(n) : 64;
  std::vector<std::pair<long, long>> ranges;
  for (int c = 0; c < slices; ++c) {
    long lo = n * c / slices, hi = n * (c + 1) / slices;
    if (lo < hi) ranges.push_back({lo, hi});
  }
  if (threads == 1) {
    for (size_t i = 0; i < ranges.size(); ++i)
      fn(ranges[i].first, ranges[i].second, int(i));
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= ranges.size()) return;
        fn(ranges[i].first, ranges[i].second, int(i));
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace twistrec
