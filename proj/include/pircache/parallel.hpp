#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pircache {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Indices are claimed dynamically; callers write results into
/// slot i so the outcome does not depend on scheduling. The first exception
/// thrown by any body is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t threads = 0) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace pircache
