/*
 * parallel.hh
 *
 * Chunked parallel-for with deterministic reduction. Work is split into
 * index chunks, each chunk produces a partial result, and partials are
 * merged in chunk order, so results never depend on the thread count.
 */
#ifndef IODS_PARALLEL_HH_
#define IODS_PARALLEL_HH_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace iods {

inline int default_thread_count() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

/* global knob set by the CLI's --threads flag */
inline int& thread_count() {
  static int n = default_thread_count();
  return n;
}

/* Runs body(begin, end, partial) on disjoint chunks covering [0, n) and
 * merges partials in chunk order via merge(acc, partial). */
template <class Partial, class Body, class Merge>
Partial parallel_chunks(std::size_t n, Body body, Merge merge, Partial init = Partial{}) {
  int threads = std::max(1, thread_count());
  if (n == 0) return init;
  std::size_t chunks = std::min<std::size_t>(n, static_cast<std::size_t>(threads) * 4);
  std::size_t per = (n + chunks - 1) / chunks;
  std::vector<Partial> partials(chunks);
  if (threads == 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      body(c * per, std::min(n, (c + 1) * per), partials[c]);
  } else {
    std::vector<std::thread> pool;
    std::size_t c_next = 0;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t c = static_cast<std::size_t>(t); c < chunks;
             c += static_cast<std::size_t>(threads))
          body(c * per, std::min(n, (c + 1) * per), partials[c]);
      });
      (void)c_next;
    }
    for (auto& th : pool) th.join();
  }
  Partial acc = init;
  for (auto& p : partials) merge(acc, p);
  return acc;
}

}  // namespace iods

#endif  // IODS_PARALLEL_HH_
