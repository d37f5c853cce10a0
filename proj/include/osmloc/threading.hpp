#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace osmloc {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(lo, hi) over a contiguous partition of [begin, end), one chunk per
// worker. Each index lands in exactly one chunk, so results are
// scheduling-independent as long as the chunks write disjoint state.
inline void parallel_for_chunks(int begin, int end, int threads,
                                const std::function<void(int, int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  threads = std::min(resolve_threads(threads), count);
  if (threads <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& fn) {
  parallel_for_chunks(begin, end, threads, [&fn](int lo, int hi) {
    for (int i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace osmloc
