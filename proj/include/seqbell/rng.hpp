#pragma once

#include <cstdint>

namespace seqbell {

// Counter-based 64-bit generator (splitmix64). The state advances by a fixed
// odd increment and the output is a bijective mix of the counter, so streams
// with distinct seeds are independent and a stream can be reproduced from its
// seed alone. Used everywhere randomness is needed; never std::random_device.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // +1 with probability (1 + bias)/2, otherwise -1.
  int pm_one(double bias) { return bernoulli(0.5 * (1.0 + bias)) ? +1 : -1; }

 private:
  std::uint64_t state_;
};

// Substream seed derivation: chunk i of a run seeded with s draws from
// Rng(substream(s, i)). mix is the splitmix64 finalizer, so substreams do not
// overlap regardless of how work is split across threads.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace seqbell
