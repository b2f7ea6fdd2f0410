#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace fermat {

// Worker cap from FERMAT_WORKERS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("FERMAT_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so the
// outcome does not depend on scheduling. The first exception by index is rethrown.
template <class Fn>
void parallel_for(size_t n, const Fn& fn) {
  const size_t workers = std::min<size_t>(static_cast<size_t>(worker_count()), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fermat
