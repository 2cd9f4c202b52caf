#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace gdist::kernels {

/// Accumulated first and second moments of displacement samples
/// y_i = F z_i, where z_i are the six standard normals of
/// standard_normal6(seed, i) and F is a row-major 6x6 factor.
///
/// The accumulation order is part of the contract so that every kernel
/// produces bit-identical sums:
///   - samples are grouped into blocks of kBlockSize consecutive indices,
///     anchored at `begin`;
///   - within a block, four interleaved lane accumulators are kept
///     (lane = local index mod 4) and folded as (l0+l1)+(l2+l3);
///   - y_p is evaluated as fma(F[p][5], z5, ... fma(F[p][1], z1,
///     F[p][0]*z0)) and products accumulate via fma;
///   - block results are folded by a pairwise tree over the block index.
/// The result therefore depends only on (factor, seed, begin, end), not on
/// the instruction set or the number of worker threads.
struct MomentSums {
  std::array<double, 6> sum{};     // sum of y
  std::array<double, 21> outer{};  // sum of y y^T, upper triangle row-major
  uint64_t count = 0;

  static MomentSums combine(const MomentSums& a, const MomentSums& b);
};

inline constexpr uint64_t kBlockSize = 4096;  // multiple of the lane width

enum class Kernel { auto_select, scalar, avx2 };

/// True when the running CPU supports the AVX2+FMA kernel.
bool avx2_available();

/// auto_select -> the best kernel available at runtime.
Kernel resolve_kernel(Kernel k);

std::string kernel_name(Kernel k);

/// Accumulate moments of samples with global indices [begin, end).
/// `threads` splits whole blocks across workers; any thread count yields
/// identical results.
MomentSums accumulate_displacement_moments(const std::array<double, 36>& factor,
                                           uint64_t seed, uint64_t begin,
                                           uint64_t end,
                                           Kernel kernel = Kernel::auto_select,
                                           int threads = 1);

/// Materialize samples y_i, row-major (end-begin) x 6.
void generate_displacements(const std::array<double, 36>& factor, uint64_t seed,
                            uint64_t begin, uint64_t end, double* out);

namespace detail {
// Per-block accumulators; lanes[0..5] hold the running sums, lanes[6..26]
// the upper-triangle products. Exposed for the equivalence tests.
void accumulate_block_scalar(const double* factor, uint64_t seed,
                             uint64_t block_start, uint64_t i0, uint64_t i1,
                             double lanes[27][4]);
void accumulate_block_avx2(const double* factor, uint64_t seed,
                           uint64_t block_start, uint64_t i0, uint64_t i1,
                           double lanes[27][4]);
}  // namespace detail

}  // namespace gdist::kernels
