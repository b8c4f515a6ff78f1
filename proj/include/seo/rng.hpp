#pragma once

#include <cmath>
#include <cstdint>

namespace seo {

// Deterministic 64-bit generator (splitmix64). The <random> engines are
// portable but the distributions are not, and run traces must be bit-identical
// for a given seed, so sampling is done by hand from raw uniform draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Rayleigh by inverse CDF; strictly positive for scale > 0.
  double rayleigh(double scale) {
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    return scale * std::sqrt(-2.0 * std::log1p(-u));
  }

  // Independent stream derived from this generator's seed, without
  // advancing it. Used to decouple obstacle placement from channel draws.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace seo
