#pragma once

// Philox4x64-10 counter-based generator. A block is a pure function of
// (key, counter), so any walker/move can be drawn in any order.

#include <array>
#include <cmath>
#include <cstdint>

namespace fairshare::random {

using Block = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

namespace detail {

inline constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline Block round(const Block& x, const Key& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kM0, x[0], hi0, lo0);
  mulhilo(kM1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace detail

inline Block philox4x64(Block ctr, Key key) {
  ctr = detail::round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += detail::kW0;
    key[1] += detail::kW1;
    ctr = detail::round(ctr, key);
  }
  return ctr;
}

/// Uniform on [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Uniform on (0, 1]; safe for log().
inline double to_unit_open(std::uint64_t x) { return 1.0 - to_unit(x); }

/// Block for move `move` of stream `stream` under `seed`.
inline Block draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t move) {
  return philox4x64({move, 0, 0, 0}, {seed, stream});
}

}  // namespace fairshare::random
