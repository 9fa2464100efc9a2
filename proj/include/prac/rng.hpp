// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_RNG_HPP
#define PRAC_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace prac {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace detail

// Deterministic stream generator: xoshiro256** seeded through splitmix64.
// The algorithm is fixed here so that identical seeds reproduce identical
// draw sequences on every platform and build. Substreams are derived by
// hashing a tag (and optional indices) into a fresh seed; derivation depends
// only on the parent seed, never on how much the parent has consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = detail::splitmix64(s);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    ++counter_;
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  RngStream derive(std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0) const {
    std::uint64_t h = seed_ ^ detail::fnv1a64(tag);
    h ^= detail::rotl(a + 0x9e3779b97f4a7c15ULL, 17);
    h ^= detail::rotl(b + 0xc2b2ae3d27d4eb4fULL, 41);
    std::uint64_t s = h;
    return RngStream(detail::splitmix64(s));
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates, identical results for identical streams.
template <class T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace prac

#endif  // PRAC_RNG_HPP
