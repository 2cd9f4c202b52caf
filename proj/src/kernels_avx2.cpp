#include "gdist/kernels.hpp"
#include "gdist/rng.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace gdist::kernels::detail {

// Four samples per iteration, one per vector lane. Lane l of every
// accumulator sees exactly the samples the scalar kernel routes to
// lanes[.][l], in the same order and with the same fma associations, so
// the two kernels agree bit-for-bit.
void accumulate_block_avx2(const double* factor, uint64_t seed,
                           uint64_t block_start, uint64_t i0, uint64_t i1,
                           double lanes[27][4]) {
  __m256d acc[27];
  for (int k = 0; k < 27; ++k) acc[k] = _mm256_loadu_pd(lanes[k]);

  alignas(32) double zbuf[6][4];
  uint64_t i = i0;
  for (; i + 4 <= i1; i += 4) {
    for (int s = 0; s < 4; ++s) {
      const auto z = standard_normal6(seed, i + s);
      for (int q = 0; q < 6; ++q) zbuf[q][s] = z[q];
    }
    __m256d z[6], y[6];
    for (int q = 0; q < 6; ++q) z[q] = _mm256_load_pd(zbuf[q]);
    for (int p = 0; p < 6; ++p) {
      __m256d a = _mm256_mul_pd(_mm256_set1_pd(factor[6 * p]), z[0]);
      for (int q = 1; q < 6; ++q)
        a = _mm256_fmadd_pd(_mm256_set1_pd(factor[6 * p + q]), z[q], a);
      y[p] = a;
    }
    for (int p = 0; p < 6; ++p) acc[p] = _mm256_add_pd(acc[p], y[p]);
    int k = 6;
    for (int p = 0; p < 6; ++p)
      for (int q = p; q < 6; ++q, ++k) acc[k] = _mm256_fmadd_pd(y[p], y[q], acc[k]);
  }

  for (int k = 0; k < 27; ++k) _mm256_storeu_pd(lanes[k], acc[k]);

  // Partial tail group (< 4 samples): the scalar rule continues the lane
  // cycle because i - block_start stays aligned.
  if (i < i1) accumulate_block_scalar(factor, seed, block_start, i, i1, lanes);
}

}  // namespace gdist::kernels::detail

#else  // no AVX2 at compile time (non-x86 build): dispatch never lands here

#include <stdexcept>

namespace gdist::kernels::detail {

void accumulate_block_avx2(const double*, uint64_t, uint64_t, uint64_t,
                           uint64_t, double[27][4]) {
  throw std::runtime_error("AVX2 kernel not compiled on this platform");
}

}  // namespace gdist::kernels::detail

#endif
