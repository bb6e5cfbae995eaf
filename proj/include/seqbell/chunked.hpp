#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "seqbell/rng.hpp"

namespace seqbell {

inline constexpr long long kChunkRounds = 1 << 16;

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hc = std::thread::hardware_concurrency();
  if (hc == 0) return 1;
  return static_cast<int>(std::min(hc, 8u));
}

// Runs `rounds` rounds split into fixed-size chunks; chunk c draws from
// Rng(substream(seed, c)) regardless of which worker executes it. Each worker
// accumulates into its own Acc; partial results merge with +=. Acc must hold
// integer counts only, so the merged result is identical for any worker count.
template <class Acc, class PerRound>
Acc run_chunked(long long rounds, std::uint64_t seed, int workers,
                PerRound per_round) {
  const long long nchunks = (rounds + kChunkRounds - 1) / kChunkRounds;
  const int w = static_cast<int>(
      std::min<long long>(resolve_workers(workers), std::max<long long>(nchunks, 1)));
  std::vector<Acc> partial(static_cast<std::size_t>(w));
  auto work = [&](int wi) {
    Acc& acc = partial[static_cast<std::size_t>(wi)];
    for (long long c = wi; c < nchunks; c += w) {
      Rng rng(substream(seed, static_cast<std::uint64_t>(c)));
      const long long n =
          std::min<long long>(kChunkRounds, rounds - c * kChunkRounds);
      for (long long r = 0; r < n; ++r) per_round(acc, rng);
    }
  };
  if (w == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (int wi = 0; wi < w; ++wi) threads.emplace_back(work, wi);
    for (auto& t : threads) t.join();
  }
  Acc total{};
  for (const Acc& a : partial) total += a;
  return total;
}

}  // namespace seqbell
