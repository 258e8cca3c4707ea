#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace tamp {

// Counter-based generator: output i of stream (seed, stream) is a fixed
// function of (seed, stream, i), so parallel trials keyed by stream id are
// reproducible regardless of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  // Uniform on (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Binomial(n, 1/2), exactly, from random bits.
  long binomial_half(long n) {
    long k = 0;
    for (; n >= 64; n -= 64) k += std::popcount(next_u64());
    if (n > 0) k += std::popcount(next_u64() >> (64 - n));
    return k;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tamp
