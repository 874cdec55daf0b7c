#ifndef CHIRF_MC_HPP
#define CHIRF_MC_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "chirf/rng.hpp"

namespace chirf {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

// Streaming mean/variance accumulator (Welford), with the pairwise combine
// used to merge per-batch results in a fixed order.
struct Welford {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void combine(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double d = o.mean - mean;
    std::int64_t nt = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(nt);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(nt);
    n = nt;
  }

  MCEstimate estimate(std::uint64_t seed) const {
    MCEstimate e;
    e.value = mean;
    e.n = n;
    e.seed = seed;
    if (n > 1)
      e.std_error = std::sqrt(m2 / (static_cast<double>(n - 1) *
                                    static_cast<double>(n)));
    return e;
  }
};

inline constexpr std::int64_t kBatchSamples = 1 << 16;

// Counter offset between batches inside one stream; a batch can never
// consume this many Philox blocks.
inline constexpr std::uint64_t kBatchBlockStride = std::uint64_t{1} << 32;

// Runs n samples of `fn(rng, acc...)` split into fixed-size batches.  Each
// batch b draws from the same stream at block offset b * stride, so the
// result is bitwise independent of the thread count; per-batch accumulators
// are merged in batch order.  Accumulator must provide combine().
template <typename Acc, typename Fn>
Acc run_batched(std::int64_t n, const RngStream& base, int threads, Fn fn) {
  const std::int64_t n_batches = (n + kBatchSamples - 1) / kBatchSamples;
  std::vector<Acc> results(static_cast<std::size_t>(n_batches));
  auto worker_loop = [&](std::atomic<std::int64_t>& next) {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= n_batches) break;
      RngStream rng = base;
      rng.seek_block(static_cast<std::uint64_t>(b) * kBatchBlockStride);
      std::int64_t lo = b * kBatchSamples;
      std::int64_t hi = std::min(n, lo + kBatchSamples);
      Acc acc;
      for (std::int64_t i = lo; i < hi; ++i) fn(rng, acc);
      results[static_cast<std::size_t>(b)] = acc;
    }
  };
  std::atomic<std::int64_t> next{0};
  if (threads <= 1) {
    worker_loop(next);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] { worker_loop(next); });
    for (auto& th : pool) th.join();
  }
  Acc total;
  for (const Acc& r : results) total.combine(r);
  return total;
}

}  // namespace chirf

#endif
