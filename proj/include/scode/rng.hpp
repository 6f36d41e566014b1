#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace scode {

// Sample streams are organized in fixed-size blocks. Block b of a stream with
// base seed s is generated by a fresh engine seeded with s ^ splitmix64(b),
// so a stream is fully determined by (seed, samples) and independent of how
// many worker threads consume it. Per-block partial results are merged in
// block order, which keeps estimates bit-identical across thread counts.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for worker/block k derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  return base ^ splitmix64(k);
}

inline constexpr std::int64_t kSamplesPerBlock = 1 << 16;

inline int default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs `per_block(block_index, samples_in_block, engine, acc)` over the
/// blocks of a stream, possibly on several threads, and folds the per-block
/// accumulators in block order. Acc needs a copy ctor (from `proto`) and
/// `merge(const Acc&)`.
template <class Acc, class PerBlock>
Acc reduce_sample_blocks(std::int64_t samples, std::uint64_t seed,
                         const Acc& proto, PerBlock per_block) {
  const std::int64_t n_blocks =
      std::max<std::int64_t>(1, (samples + kSamplesPerBlock - 1) / kSamplesPerBlock);
  std::vector<Acc> partial(static_cast<std::size_t>(n_blocks), proto);

  auto run_strided = [&](std::int64_t first, std::int64_t stride) {
    for (std::int64_t b = first; b < n_blocks; b += stride) {
      const std::int64_t begin = b * kSamplesPerBlock;
      const std::int64_t count = std::min<std::int64_t>(kSamplesPerBlock, samples - begin);
      if (count <= 0) continue;
      std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(b)));
      per_block(b, count, engine, partial[static_cast<std::size_t>(b)]);
    }
  };

  const int threads =
      static_cast<int>(std::min<std::int64_t>(default_thread_count(), n_blocks));
  if (threads <= 1) {
    run_strided(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(run_strided, t, threads);
    for (auto& th : pool) th.join();
  }

  Acc total = proto;
  for (const Acc& p : partial) total.merge(p);
  return total;
}

}  // namespace scode
