#include <dirac/sampling.hpp>

namespace dirac {

std::vector<ChartPoint> sample_points(const Chart& c, int n, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<ChartPoint> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd x(c.dim());
    for (int i = 0; i < c.dim(); ++i) x(i) = rng.uniform(c.lo(i), c.hi(i));
    pts.push_back({c.name, std::move(x)});
  }
  return pts;
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  SplitMix64 rng(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return rng.next();
}

}  // namespace dirac
