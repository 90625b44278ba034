#pragma once

#include <thread>
#include <vector>

namespace kink {

inline int hardware_workers(int requested = 0) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(task) for task = 0..n_tasks-1 across workers. Tasks own their
// results (indexed slots), so merges stay order-deterministic regardless
// of scheduling.
template <typename Fn>
void parallel_tasks(int n_tasks, int workers, Fn&& fn) {
  workers = std::min(hardware_workers(workers), n_tasks);
  if (workers <= 1) {
    for (int t = 0; t < n_tasks; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn] {
      for (int t = w; t < n_tasks; t += workers) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace kink
