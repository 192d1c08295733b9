#pragma once

// Site loops split into contiguous blocks over worker threads. Callers write
// per-index results into preallocated slots and reduce sequentially afterwards,
// so results do not depend on the thread count.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace g2lab {

/// Worker count: G2LAB_THREADS if set to a positive integer, else the hardware count.
inline int thread_count() {
  if (const char *env = std::getenv("G2LAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F> void parallel_for(size_t n, F &&f) {
  const size_t workers = std::min<size_t>(size_t(thread_count()), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const size_t block = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    size_t lo = w * block, hi = std::min(n, lo + block);
    pool.emplace_back([&f, lo, hi] {
      for (size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto &t : pool) t.join();
}

} // namespace g2lab
