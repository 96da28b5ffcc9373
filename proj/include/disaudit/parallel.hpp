#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace disaudit {

/// Worker cap: DISAUDIT_THREADS if set and positive, else hardware concurrency.
std::size_t thread_limit();

/// Runs body(i) for i in [0, n). Work items must write to disjoint outputs;
/// the first exception thrown (by index order of discovery) is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t max_threads = thread_limit()) {
  const std::size_t workers = std::min(n, std::max<std::size_t>(1, max_threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace disaudit
