// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_RNG_HPP
#define FAIRDIV_RNG_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace fairdiv {

// Seeded generator with hand-rolled distributions so that sequences are
// identical across standard library implementations. std::mt19937_64 is
// bit-reproducible by the standard; std::uniform_int_distribution is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // splitmix64 finalizer; used to derive child seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Deterministic seed splitting: each path component folds into the
  // running hash. Used as derive(master, {experiment, sampler, x, rep}).
  static std::uint64_t derive(std::uint64_t master,
                              std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix(master);
    for (std::uint64_t p : path) {
      h = mix(h ^ mix(p));
    }
    return h;
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace fairdiv

#endif  // FAIRDIV_RNG_HPP
