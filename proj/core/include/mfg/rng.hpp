#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mfg {

/// Philox4x32-10 (Salmon et al., SC'11): a keyed bijection on 128-bit
/// counters. Draws are pure functions of (key, counter), so streams can be
/// evaluated in any order and on any thread.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}
  explicit constexpr Philox4x32(Key key) : key_(key) {}

  constexpr Counter operator()(Counter c) const {
    Key k = key_;
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }

 private:
  Key key_;
};

/// Uniform in (0, 1) from two 32-bit words: the midpoint of one of 2^52
/// equal cells, so both endpoints are excluded exactly.
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Two independent standard normals from one Philox block (Box-Muller).
inline std::array<double, 2> normal_pair(const Philox4x32::Counter& block) {
  const double u1 = uniform_open(block[0], block[1]);
  const double u2 = uniform_open(block[2], block[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of the named substream `name` under `root`. Distinct names give
/// unrelated seeds, so adding a consumer never shifts another's draws.
inline constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return splitmix64(splitmix64(root) ^ h);
}

// Fourth counter word: which kind of draw a block feeds.
enum class DrawPurpose : std::uint32_t { step_noise = 0, initial_position = 1 };

inline Philox4x32::Counter draw_counter(std::uint64_t step, std::uint64_t stream, DrawPurpose purpose) {
  return {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(stream),
          static_cast<std::uint32_t>(stream >> 32),
          static_cast<std::uint32_t>(purpose) | static_cast<std::uint32_t>(step >> 32) << 8};
}

}  // namespace mfg
