#pragma once
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sg {

// run fn(job) for job in [0, jobs). Determinism is the caller's contract:
// every job writes only to its own index slot, so thread count and schedule
// never touch the results.
inline void parallel_for(int64_t jobs, int threads,
                         const std::function<void(int64_t)>& fn) {
  if (jobs <= 0) return;
  if (threads <= 1 || jobs == 1) {
    for (int64_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  int nt = int(std::min<int64_t>(threads, jobs));
  std::vector<std::thread> pool;
  pool.reserve(size_t(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace sg
