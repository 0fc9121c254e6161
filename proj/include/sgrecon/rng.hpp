#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sgrecon {

/// Counter-based random numbers: every draw is a pure function of the key,
/// so streams are order-independent and bitwise reproducible regardless of
/// thread count or evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a multi-part key into one well-distributed 64-bit word.
inline std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

/// Uniform double in (0, 1]; never returns 0 so it is safe under log().
inline double uniform_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal draw for the given key via Box-Muller.
inline double gaussian_sample(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t u_bits = counter_mix(seed, a, b);
  const std::uint64_t v_bits = splitmix64(u_bits ^ 0xda3e39cb94b95bdbULL);
  const double r = std::sqrt(-2.0 * std::log(uniform_unit(u_bits)));
  const double theta = 2.0 * std::numbers::pi * uniform_unit(v_bits);
  return r * std::cos(theta);
}

}  // namespace sgrecon
