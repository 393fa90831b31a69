#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace cuberisk {

// Evaluates fn(i) for every i in [0, count) across `workers` threads and
// returns the results in index order. Work items must be independent; the
// output (and therefore any reduction over it) does not depend on the
// worker count.
template <class R, class Fn>
std::vector<R> run_indexed(std::uint64_t count, unsigned workers, Fn fn) {
  std::vector<R> results(count);
  if (workers <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  const unsigned spawned = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(spawned);
  for (unsigned t = 0; t < spawned; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) break;
        results[i] = fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace cuberisk
