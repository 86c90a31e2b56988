#pragma once

// Seeded random sources. Every random quantity is drawn from a SplitMix64 stream
// whose state is the 64-bit seed XOR the FNV-1a hash of a stream name, so that a
// (seed, name) pair fixes the sequence on every platform:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Uniform doubles in [0, 1) take the top 53 bits: (next() >> 11) * 2^-53.

#include <cstdint>
#include <string_view>

#include "chernlab/grid.hpp"

namespace chernlab {

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  SplitMix64(std::uint64_t seed, std::string_view stream) : state_(seed ^ fnv1a64(stream)) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Random trigonometric polynomial with integer frequencies |k_a| <= kmax on every
/// real axis. Coefficients are normalized so that sum |c_k| * weight(k) = amplitude,
/// where weight is 1 for `Weight::value` and pi^2 |k|^2 for `Weight::hessian`;
/// this bounds sup|f| (resp. every entry of the complex Hessian) by `amplitude`.
/// Real fields pair each mode with its conjugate.
enum class Weight { value, hessian };

Field random_trig_field(const ComplexGrid& grid, std::uint64_t seed, std::string_view stream,
                        int kmax, double amplitude, bool real, Weight weight = Weight::value);

}  // namespace chernlab
