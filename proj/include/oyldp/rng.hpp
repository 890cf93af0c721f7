#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

// Counter-based generator: the k-th output is a finalizer applied to
// key + k * odd_constant, so any replicate or line can be regenerated in
// isolation and streams never overlap by construction.

namespace oyldp::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Bijective 64-bit finalizer (splitmix64's output stage).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent child seed for replicate idx of a run seeded with seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t idx) {
  return mix64(mix64(seed ^ kGolden) + idx);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0,
             std::uint64_t substream = 0)
      : key_(mix64(mix64(mix64(seed ^ kGolden) + stream) + substream)),
        counter_(0) {}

  std::uint64_t next_u64() { return mix64(key_ + (counter_++) * kGolden); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normals by Box-Muller; both members of each pair are emitted.
  void fill_gaussian(double* out, std::ptrdiff_t n) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    std::ptrdiff_t i = 0;
    while (i + 1 < n) {
      const double r = std::sqrt(-2.0 * std::log(next_uniform()));
      const double a = two_pi * next_uniform();
      out[i++] = r * std::cos(a);
      out[i++] = r * std::sin(a);
    }
    if (i < n) {
      const double r = std::sqrt(-2.0 * std::log(next_uniform()));
      out[i] = r * std::cos(two_pi * next_uniform());
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace oyldp::rng
