#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace donorspin {

/// Static block partition of [0, n) across at most `threads` workers.
/// The body must write only to index-addressed slots so results are
/// independent of the partition. The first exception raised by any worker is
/// rethrown on the calling thread.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  const int workers = std::min(threads < 1 ? 1 : threads, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto run_block = [&](int lo, int hi) {
    try {
      for (int i = lo; i < hi; ++i) body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int base = n / workers;
  const int rem = n % workers;
  int lo = 0;
  for (int t = 0; t < workers; ++t) {
    const int hi = lo + base + (t < rem ? 1 : 0);
    pool.emplace_back(run_block, lo, hi);
    lo = hi;
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace donorspin
