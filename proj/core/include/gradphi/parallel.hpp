#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gradphi {

/// Process-wide worker count; 0 means one per hardware thread.
inline std::atomic<unsigned>& worker_override() {
  static std::atomic<unsigned> n{0};
  return n;
}

inline void set_default_workers(unsigned n) { worker_override() = n; }

/// Number of worker threads; 0 or 1 means run inline.
inline unsigned default_workers() {
  if (const unsigned n = worker_override().load(); n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Run body(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled by exactly one call, so results written to slot i do not depend
/// on scheduling. The first exception thrown by any call is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = default_workers()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gradphi
