#pragma once

// Counter-based uniform generator: Philox4x64 with 10 rounds.  Every draw is
// a pure function of (key, counter), so path i / step m / purpose p can be
// addressed directly without sequential state.  This is what makes common
// random numbers and bit-reproducible parallel accumulation cheap.

#include <array>
#include <cmath>
#include <cstdint>

namespace jumpeq {

namespace philox {

inline constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void round_once(std::array<std::uint64_t, 4>& c, const std::array<std::uint64_t, 2>& k) {
  const unsigned __int128 p0 = static_cast<unsigned __int128>(kMult0) * c[0];
  const unsigned __int128 p1 = static_cast<unsigned __int128>(kMult1) * c[2];
  const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
  const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
  const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
  const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 10-round block function; the key is bumped by the Weyl constants between
// rounds (not before the first one)
inline std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> counter,
                                          std::array<std::uint64_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    round_once(counter, key);
  }
  return counter;
}

}  // namespace philox

// maps a 64-bit word to (0, 1]: u = 1 - (w >> 11) * 2^-53
inline double uniform_pos(std::uint64_t w) {
  return 1.0 - static_cast<double>(w >> 11) * 0x1.0p-53;
}

// maps a 64-bit word to [0, 1)
inline double uniform01(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Box-Muller pair from two 64-bit words; u1 in (0, 1] keeps the log finite
inline std::array<double, 2> normal_pair(std::uint64_t w1, std::uint64_t w2) {
  const double u1 = uniform_pos(w1);
  const double u2 = uniform01(w2);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

// One keyed stream of blocks addressed by (path, step, purpose).
struct CounterRng {
  std::array<std::uint64_t, 2> key;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key{seed, stream} {}

  std::array<std::uint64_t, 4> raw(std::uint64_t path, std::uint64_t step,
                                   std::uint64_t purpose) const {
    return philox::block({path, step, purpose, 0}, key);
  }

  // two independent standard normals for (path, step)
  std::array<double, 2> normals(std::uint64_t path, std::uint64_t step,
                                std::uint64_t purpose) const {
    const auto w = raw(path, step, purpose);
    return normal_pair(w[0], w[1]);
  }

  double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t purpose) const {
    return uniform01(raw(path, step, purpose)[0]);
  }

  // strictly positive uniform, safe for -log(U) transforms
  double uniform_positive(std::uint64_t path, std::uint64_t step,
                          std::uint64_t purpose) const {
    return uniform_pos(raw(path, step, purpose)[0]);
  }
};

}  // namespace jumpeq
