#pragma once

#include <cmath>
#include <cstdint>

namespace microsage {

// splitmix64: tiny, fast, and identical on every platform for a given seed.
// std::mt19937 + distributions are implementation-defined, so every seeded
// component in the library draws from this generator instead.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Modulo bias is ~2^-50 at the bounds used here (shuffles, subset picks).
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // Box-Muller, cosine branch. Two draws are consumed per call whether or
  // not sigma is zero, so streams stay aligned across noise settings.
  double gaussian(double sigma) {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return sigma * z;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 g(base ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
  return g.next();
}

}  // namespace microsage
