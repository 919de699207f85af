#pragma once

// Deterministic sampling.  A fixed seed must reproduce the exact same sample
// coordinates on every platform, so the generator is a self-contained
// splitmix64 rather than a distribution from <random>.

#include <cstdint>
#include <vector>

#include <dirac/chart.hpp>

namespace dirac {

struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits; exact in double arithmetic.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
};

// n points uniform over the chart box, coordinates drawn in order.
std::vector<ChartPoint> sample_points(const Chart& c, int n, uint64_t seed);

// Decorrelates per-purpose substreams derived from one user seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace dirac
