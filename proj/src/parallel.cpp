#include "eigenflow/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace eigenflow {

int worker_count() {
  static const int count = [] {
    if (const char* env = std::getenv("EIGENFLOW_WORKERS")) {
      const int n = std::atoi(env);
      if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return count;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int workers = worker_count();
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * static_cast<std::size_t>(workers)));
  auto run = [&] {
    while (true) {
      const std::size_t begin = cursor.fetch_add(chunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

}  // namespace eigenflow
