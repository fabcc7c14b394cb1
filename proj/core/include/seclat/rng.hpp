#pragma once

#include <cmath>
#include <cstdint>

namespace seclat {

/// splitmix64; used to expand seeds into stream states.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/** xoshiro256++ with explicitly pinned seeding and samplers.
 *
 *  The standard library's distributions have implementation-defined
 *  algorithms; everything here is spelled out so identical (seed, stream)
 *  pairs give identical draws on any platform, which the reproducibility
 *  guarantees rely on. Per-trial streams are derived from (seed, index).
 */
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) {
    uint64_t sm = seed ^ (0xd1b54a32d192ed03ULL +
                          stream * 0x9e3779b97f4a7c15ULL);
    for (auto& word : s_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on (0, 1]; never returns 0 so logs are safe.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) (Lemire's multiply-shift; n > 0).
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  uint64_t s_[4];
};

/// Failures before the first success, success probability p in (0, 1].
inline int64_t sample_geometric_failures(Rng& rng, double p) {
  if (p >= 1.0) return 0;
  const double u = rng.uniform();
  const double q = 1.0 - p;
  if (u > q) return 0;  // the common case, no log needed
  return static_cast<int64_t>(std::log(u) / std::log(q));
}

inline double sample_exponential(Rng& rng, double rate) {
  return -std::log(rng.uniform()) / rate;
}

/// Standard normal via Box-Muller (one value per call; exact, stateless).
inline double sample_normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925287 * u2);
}

/// Gamma(shape, rate) by Marsaglia-Tsang squeeze (exact rejection), with the
/// standard boost for shape < 1.
inline double sample_gamma(Rng& rng, double shape, double rate) {
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

/// Sum of n exponentials of the given rate. Uses the gamma sampler once the
/// log-product gets long.
inline double sample_erlang(Rng& rng, int n, double rate) {
  if (n > 16) return sample_gamma(rng, static_cast<double>(n), rate);
  double prod = 1.0;
  for (int i = 0; i < n; ++i) prod *= rng.uniform();
  return -std::log(prod) / rate;
}

/// Poisson(mean) by Knuth's product method; larger means split into halves
/// so the method stays exact without ever multiplying down to denormals.
inline int64_t sample_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  int64_t total = 0;
  while (mean > 30.0) {
    const double half = mean * 0.5;
    total += sample_poisson(rng, half);
    mean -= half;
  }
  const double limit = std::exp(-mean);
  double prod = rng.uniform();
  int64_t count = 0;
  while (prod > limit) {
    prod *= rng.uniform();
    ++count;
  }
  return total + count;
}

}  // namespace seclat
