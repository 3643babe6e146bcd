#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "sphertess/random.hpp"

namespace sphertess {

/// Worker count from SPHERTESS_THREADS (0 or unset means hardware concurrency).
unsigned thread_count();

/// Overrides the worker count for the current process (0 restores the default).
void set_thread_count(unsigned n);

namespace detail {
inline thread_local bool in_worker = false;
}

/// Runs fn(i) for i in [0, n) across workers in contiguous chunks. fn must only
/// touch state owned by index i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = 0) {
  if (workers == 0) workers = thread_count();
  if (detail::in_worker) workers = 1;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      detail::in_worker = true;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Replication i receives its own generator seeded by derive_seed(seed, i), so
/// the returned vector is identical for any worker count.
template <class Fn>
auto replicate(std::size_t n, std::uint64_t seed, Fn&& fn, unsigned workers = 0) {
  using Result = std::invoke_result_t<Fn&, std::size_t, Rng&>;
  std::vector<Result> out(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        out[i] = fn(i, rng);
      },
      workers);
  return out;
}

/// Fixed chunk size for sample-level Monte Carlo loops; the chunk layout only
/// depends on n, never on the worker count.
inline constexpr std::size_t kSampleChunk = 4096;

/// Counts successes of pred(rng) over n draws; chunk c uses derive_seed(seed, c).
template <class Pred>
std::uint64_t count_hits(std::size_t n, std::uint64_t seed, Pred&& pred, unsigned workers = 0) {
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Rng rng = make_rng(seed, c);
        const std::size_t begin = c * kSampleChunk;
        const std::size_t end = std::min(n, begin + kSampleChunk);
        std::uint64_t local = 0;
        for (std::size_t i = begin; i < end; ++i) local += pred(rng) ? 1u : 0u;
        hits[c] = local;
      },
      workers);
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

}  // namespace sphertess
