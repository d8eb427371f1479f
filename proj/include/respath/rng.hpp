#ifndef RESPATH_RNG_HPP
#define RESPATH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace respath {

// Seeded generator with fully specified output. std::mt19937_64 has a
// standard-mandated sequence, but the std distributions do not, so the
// variate mappings are implemented here.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller (one variate per call, cached pair).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  int sign() { return (engine_() & 1u) ? 1 : -1; }

  // Derive an independent stream, e.g. one per grid point or sign draw.
  Rng split(std::uint64_t stream) { return Rng(mix(next_u64(), stream)); }

  // Stateless derivation: same (seed, stream) always gives the same child.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed, stream);
  }

private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

} // namespace respath

#endif
