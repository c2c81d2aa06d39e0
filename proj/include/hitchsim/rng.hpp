#pragma once

#include <cstdint>
#include <random>

namespace hitchsim {

// Hand-rolled draws on top of mt19937_64 so results are identical on every
// platform (std distributions are implementation-defined).
inline double uniform01(std::mt19937_64& g) {
  return (g() >> 11) * (1.0 / 9007199254740992.0);  // [0,1), 53 bits
}

inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    std::uint64_t r = g();
    if (r < limit) return r % n;
  }
}

}  // namespace hitchsim
