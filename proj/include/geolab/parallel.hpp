#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace geolab {

// GEOLAB_THREADS overrides; otherwise hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("GEOLAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

// Runs fn(shard) for shard in [0, n) on up to `threads` workers.  Each shard
// writes only its own slot, so merging afterwards in shard order is
// deterministic whatever the thread count.
template <class Fn>
void run_shards(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace geolab
