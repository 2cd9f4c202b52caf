#include <cmath>

#include "gdist/kernels.hpp"
#include "gdist/rng.hpp"

namespace gdist::kernels::detail {

// Reference kernel. Must mirror the AVX2 lane semantics exactly: same
// per-lane operation order, explicit fma for every product accumulation.
void accumulate_block_scalar(const double* factor, uint64_t seed,
                             uint64_t block_start, uint64_t i0, uint64_t i1,
                             double lanes[27][4]) {
  for (uint64_t i = i0; i < i1; ++i) {
    const auto z = standard_normal6(seed, i);
    const int lane = static_cast<int>((i - block_start) & 3u);
    double y[6];
    for (int p = 0; p < 6; ++p) {
      double acc = factor[6 * p] * z[0];
      for (int q = 1; q < 6; ++q) acc = std::fma(factor[6 * p + q], z[q], acc);
      y[p] = acc;
    }
    for (int p = 0; p < 6; ++p) lanes[p][lane] += y[p];
    int k = 6;
    for (int p = 0; p < 6; ++p)
      for (int q = p; q < 6; ++q, ++k)
        lanes[k][lane] = std::fma(y[p], y[q], lanes[k][lane]);
  }
}

}  // namespace gdist::kernels::detail
