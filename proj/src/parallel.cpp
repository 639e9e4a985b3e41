#include "kinred/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "kinred/errors.hpp"

namespace kinred {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) {
  if (threads < 0) throw ParameterError("--threads must be >= 0");
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  g_threads.store(threads);
}

int thread_count() { return g_threads.load(); }

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      for (int i = lo; i < hi; ++i) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace kinred
