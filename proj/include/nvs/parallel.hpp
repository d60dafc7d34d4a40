#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nvs {

// Worker count used when a caller passes 0.
inline unsigned default_thread_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, count) into contiguous chunks, one per worker, and calls fn(begin, end).
// Runs inline when one worker suffices. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = default_thread_count();
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    if (count > 0) fn(std::size_t{0}, count);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace nvs
