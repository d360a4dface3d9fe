#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "eqlab/core.hpp"

namespace eqlab {

/// Number of hardware threads, never less than 1.
inline int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Fork-join loop over [0, count). Work items are claimed one at a time from a
/// shared counter, so results must be written to per-index slots by the body.
/// The first exception thrown by any worker is rethrown after all join.
template <class Fn>
void parallel_for(Index count, int workers, Fn&& body) {
  if (count <= 0) return;
  if (workers < 1) throw InvalidInputError("parallel_for: workers must be >= 1");
  const int n_threads = static_cast<int>(std::min<Index>(workers, count));
  if (n_threads == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const Index i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads) - 1);
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace eqlab
