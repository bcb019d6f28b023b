// SPDX-License-Identifier: Apache-2.0
//
// Splittable random streams: (seed, stream_id) fully determines the
// sample sequence, and distinct stream ids give independent streams.
// The stream key is mixed through splitmix64 into a PCG64-style state,
// so neighbouring ids do not produce correlated sequences.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace kin {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {
    std::uint64_t s = seed ^ 0x5851f42d4c957f2dULL;
    std::uint64_t mix = detail::splitmix64(s) ^ stream_id;
    state_ = detail::splitmix64(mix);
    inc_ = detail::splitmix64(mix) | 1ULL;  // odd increment per stream
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    // xorshift-multiply output over a 64-bit LCG state
    state_ = state_ * 6364136223846793005ULL + inc_;
    std::uint64_t x = state_;
    x ^= x >> 32;
    x *= 0xd6e8feb86659fd93ULL;
    x ^= x >> 32;
    x *= 0xd6e8feb86659fd93ULL;
    x ^= x >> 32;
    return x;
  }

  // uniform in [0, 1)
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal (Box-Muller; one value per call for exact replay)
  double normal() {
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Poisson by inversion for small mean, PTRD-free normal-free exact
  // multiplication method split into exp(-m) chunks for large mean.
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_, stream_;
  std::uint64_t state_ = 0, inc_ = 1;
};

inline std::uint64_t RngStream::poisson(double mean) {
  // product-of-uniforms method, exact; chunked so exp() never underflows
  std::uint64_t k = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = remaining > 500.0 ? 500.0 : remaining;
    remaining -= chunk;
    const double threshold = std::exp(-chunk);
    double p = 1.0;
    // counts one extra increment before the loop exits
    std::uint64_t kc = 0;
    for (;;) {
      p *= uniform();
      if (p <= threshold) break;
      ++kc;
    }
    k += kc;
  }
  return k;
}

}  // namespace kin
