#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dimers {

/// Process-wide cap on worker threads (default 1). Results never depend on it:
/// every index is computed independently and written to its own slot.
inline std::atomic<int>& thread_limit() {
  static std::atomic<int> limit{1};
  return limit;
}

inline void set_thread_count(int k) { thread_limit() = std::max(1, k); }
inline int thread_count() { return thread_limit().load(); }

/// Calls f(i) for i in [0, n) on up to thread_count() threads. The first
/// exception thrown by any worker is rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dimers
