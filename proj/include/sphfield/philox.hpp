#pragma once

#include <array>
#include <cstdint>

namespace sphfield {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
};

/// Two uniforms from one Philox block: u1 in (0, 1], u2 in [0, 1).
struct UniformPair {
  double u1;
  double u2;
};

inline UniformPair uniform_pair(const Philox4x32::Counter& ctr,
                                const Philox4x32::Key& key) {
  const auto r = Philox4x32::apply(ctr, key);
  const std::uint64_t a = (std::uint64_t{r[0]} << 32) | r[1];
  const std::uint64_t b = (std::uint64_t{r[2]} << 32) | r[3];
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return {static_cast<double>((a >> 11) + 1) * scale,
          static_cast<double>(b >> 11) * scale};
}

}  // namespace sphfield
