#include "surfstokes/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace surfstokes {

int thread_budget() {
  int cores = static_cast<int>(std::thread::hardware_concurrency());
  if (cores <= 0) cores = 1;
  if (const char* env = std::getenv("SURFSTOKES_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) cores = std::min(cores, cap);
  }
  return cores;
}

void parallel_for(int n, const std::function<void(int)>& fn, int threads) {
  if (threads <= 0) threads = thread_budget();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace surfstokes
