#include "alignbounds/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace alignbounds {

std::size_t thread_budget() {
  static const std::size_t budget = [] {
    if (const char* env = std::getenv("ALIGNBOUNDS_THREADS")) {
      try {
        const long parsed = std::stol(env);
        if (parsed > 0) return static_cast<std::size_t>(parsed);
      } catch (const std::exception&) {
      }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw > 0 ? hw : 1);
  }();
  return budget;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        if (failed.load(std::memory_order_acquire)) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true, std::memory_order_acq_rel))
            first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace alignbounds
