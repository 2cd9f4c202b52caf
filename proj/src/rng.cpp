#include "gdist/rng.hpp"

#include <cmath>

namespace gdist {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox_round(const std::array<uint32_t, 4>& c,
                                            const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c[2];
  return {static_cast<uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
          static_cast<uint32_t>(p1),
          static_cast<uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
          static_cast<uint32_t>(p0)};
}

// Two 32-bit words -> uniform in [0,1) with 53 random mantissa bits.
inline double to_uniform(uint32_t hi, uint32_t lo) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> c = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    c = philox_round(c, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::array<double, 6> standard_normal6(uint64_t seed, uint64_t index) {
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  uint32_t words[12];
  for (uint32_t block = 0; block < 3; ++block) {
    const std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(index),
                                         static_cast<uint32_t>(index >> 32),
                                         block, 0u};
    const auto out = philox4x32(ctr, key);
    for (int i = 0; i < 4; ++i) words[4 * block + i] = out[i];
  }
  std::array<double, 6> z;
  for (int pair = 0; pair < 3; ++pair) {
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - to_uniform(words[4 * pair], words[4 * pair + 1]);
    const double u2 = to_uniform(words[4 * pair + 2], words[4 * pair + 3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    z[2 * pair] = radius * std::cos(angle);
    z[2 * pair + 1] = radius * std::sin(angle);
  }
  return z;
}

}  // namespace gdist
