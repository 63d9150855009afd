#include "augsize/util.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace augsize {

namespace {
std::atomic<int> g_thread_cap{0};

int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

int env_cap() {
  const char* v = std::getenv("AUGSIZE_THREADS");
  if (v == nullptr) return 0;
  int n = std::atoi(v);
  return n > 0 ? n : 0;
}
}  // namespace

void set_thread_cap(int cap) { g_thread_cap.store(cap < 0 ? 0 : cap); }

int effective_threads() {
  int cap = g_thread_cap.load();
  if (cap == 0) cap = env_cap();
  int hw = hardware_threads();
  return cap == 0 ? hw : std::min(cap, hw);
}

namespace {
thread_local bool g_inside_parallel = false;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  const int workers = static_cast<int>(
      std::min<std::int64_t>(n, static_cast<std::int64_t>(effective_threads())));
  // Nested sections run serially; the outermost level owns the pool.
  if (workers <= 1 || g_inside_parallel) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::int64_t first_error_index = -1;

  auto worker = [&]() {
    g_inside_parallel = true;
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        // Keep the lowest-index failure so reruns report the same error.
        if (first_error_index < 0 || i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace augsize
