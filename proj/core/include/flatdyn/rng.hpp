#pragma once

#include <cstdint>

namespace flatdyn {

// splitmix64: tiny, fast, and good enough for sample generation. Used
// counter-style so that sample k of a seeded experiment is a pure function
// of (master_seed, k) regardless of worker count or visit order.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return (next() >> 11) * 0x1.0p-53; }

  // uniform integer in [lo, hi] (small ranges; modulo bias negligible here)
  std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
  }
};

// Independent stream for sample `index` of an experiment.
inline SplitMix64 sample_rng(std::uint64_t master_seed, std::uint64_t index) {
  SplitMix64 mix(master_seed ^ (0x510e527fade682d1ull * (index + 1)));
  mix.next(); // decorrelate adjacent indices
  return mix;
}

} // namespace flatdyn
