#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace saddleflow {

// Worker cap. SADDLEFLOW_THREADS overrides hardware concurrency.
inline int max_threads() {
  if (const char* env = std::getenv("SADDLEFLOW_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Parallel map over [0, n). Each index writes only its own output slot, so
// results are identical for any thread count; reductions are done by the
// caller in index order afterwards. Exceptions are rethrown (lowest worker
// id wins).
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  std::size_t t_count = static_cast<std::size_t>(max_threads());
  if (t_count > n) t_count = n;
  if (t_count <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(t_count);
  std::vector<std::thread> pool;
  pool.reserve(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace saddleflow
