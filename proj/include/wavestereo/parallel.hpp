#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace wavestereo {

/// Runs fn(i) for i in [begin, end), split into contiguous chunks across
/// `threads` workers. Callers only write disjoint outputs per index, so the
/// result never depends on the thread count. The first exception (in chunk
/// order) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::clamp(threads, 1, n);
  if (workers == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn, &err = errors[static_cast<std::size_t>(w)]] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wavestereo
