#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace conebeta {

/// Worker count: CONEBETA_THREADS caps the pool, default hardware concurrency.
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 4;
  if (const char* env = std::getenv("CONEBETA_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

/// Runs fn(i) for i in [0, n). Work is handed out through an atomic counter;
/// fn must only write to per-index slots so results are order-independent.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace conebeta
