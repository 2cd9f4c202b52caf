#pragma once

#include <array>
#include <cstdint>

namespace gdist {

/// Philox4x32-10 counter-based generator. Stateless: every 128-bit block
/// is a pure function of (key, counter), so per-sample substreams are
/// trivially splittable and thread-count independent.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

/// Six i.i.d. standard normals for the given (seed, sample index), via
/// three Philox blocks and Box-Muller. Deterministic and independent
/// across indices.
std::array<double, 6> standard_normal6(uint64_t seed, uint64_t index);

}  // namespace gdist
