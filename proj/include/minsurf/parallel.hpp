#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace minsurf {

// Worker count: MINSURF_LAB_THREADS if set (>= 1), otherwise hardware concurrency.
int thread_count();

// Runs body(j) for j in [begin, end).  Iterations must write disjoint data; the
// first exception thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(int begin, int end, Body&& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int j = begin; j < end; ++j) body(j);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int j = begin + w; j < end; j += workers) body(j);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace minsurf
