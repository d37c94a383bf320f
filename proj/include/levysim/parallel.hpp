#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace levysim {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, count) on a worker pool. fn must be a pure
/// function of i writing only to its own per-index slot, which makes the
/// result independent of the worker count; reductions happen afterwards in
/// index order.
template <class F>
void parallel_for_index(std::uint64_t count, int workers, F&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, count / (16u * static_cast<unsigned>(workers)));
  auto body = [&]() {
    while (true) {
      const std::uint64_t begin = next.fetch_add(chunk);
      if (begin >= count) return;
      const std::uint64_t end = std::min(count, begin + chunk);
      try {
        for (std::uint64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace levysim
