#include "dvr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dvr {

namespace {

std::atomic<unsigned> g_threads{0};
thread_local bool t_inside_parallel = false;

struct ParallelScope {
  bool saved;
  ParallelScope() : saved(t_inside_parallel) { t_inside_parallel = true; }
  ~ParallelScope() { t_inside_parallel = saved; }
};

}  // namespace

void set_thread_count(unsigned threads) { g_threads = threads; }

unsigned thread_count() {
  const unsigned t = g_threads.load();
  if (t != 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  // Nested regions run inline on the calling worker.
  const std::size_t workers = t_inside_parallel ? 1 : std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    ParallelScope scope;
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dvr
