#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zf {

// Process-wide worker count used by the data-parallel loops (default 1).
inline std::atomic<int>& thread_count() {
  static std::atomic<int> n{1};
  return n;
}

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker and
// results must be written to per-index slots, so the output does not depend
// on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(thread_count().load(), static_cast<int>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace zf
