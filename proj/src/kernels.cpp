#include "gdist/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gdist/rng.hpp"

namespace gdist::kernels {

namespace {

using BlockFn = void (*)(const double*, uint64_t, uint64_t, uint64_t, uint64_t,
                         double[27][4]);

MomentSums fold_lanes(const double lanes[27][4], uint64_t count) {
  MomentSums out;
  out.count = count;
  for (int k = 0; k < 27; ++k) {
    const double folded = (lanes[k][0] + lanes[k][1]) + (lanes[k][2] + lanes[k][3]);
    if (k < 6)
      out.sum[k] = folded;
    else
      out.outer[k - 6] = folded;
  }
  return out;
}

// Pairwise tree over the per-block sums; order fixed by block index.
MomentSums pairwise_reduce(std::vector<MomentSums>& blocks) {
  if (blocks.empty()) return {};
  size_t m = blocks.size();
  while (m > 1) {
    size_t w = 0;
    for (size_t i = 0; i + 1 < m; i += 2)
      blocks[w++] = MomentSums::combine(blocks[i], blocks[i + 1]);
    if (m % 2 == 1) blocks[w++] = blocks[m - 1];
    m = w;
  }
  return blocks[0];
}

}  // namespace

MomentSums MomentSums::combine(const MomentSums& a, const MomentSums& b) {
  MomentSums out;
  out.count = a.count + b.count;
  for (int i = 0; i < 6; ++i) out.sum[i] = a.sum[i] + b.sum[i];
  for (int i = 0; i < 21; ++i) out.outer[i] = a.outer[i] + b.outer[i];
  return out;
}

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Kernel resolve_kernel(Kernel k) {
  if (k == Kernel::auto_select)
    return avx2_available() ? Kernel::avx2 : Kernel::scalar;
  return k;
}

std::string kernel_name(Kernel k) {
  switch (resolve_kernel(k)) {
    case Kernel::avx2: return "avx2";
    default: return "scalar";
  }
}

MomentSums accumulate_displacement_moments(const std::array<double, 36>& factor,
                                           uint64_t seed, uint64_t begin,
                                           uint64_t end, Kernel kernel,
                                           int threads) {
  if (end < begin) throw std::invalid_argument("invalid sample range");
  const uint64_t n = end - begin;
  if (n == 0) return {};

  const Kernel resolved = resolve_kernel(kernel);
  if (resolved == Kernel::avx2 && !avx2_available())
    throw std::runtime_error("AVX2 kernel requested but not supported here");
  const BlockFn block_fn = resolved == Kernel::avx2
                               ? detail::accumulate_block_avx2
                               : detail::accumulate_block_scalar;

  const uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<MomentSums> block_sums(n_blocks);

  auto run_blocks = [&](uint64_t first_block, uint64_t stride) {
    for (uint64_t b = first_block; b < n_blocks; b += stride) {
      const uint64_t i0 = begin + b * kBlockSize;
      const uint64_t i1 = std::min(end, i0 + kBlockSize);
      double lanes[27][4];
      std::memset(lanes, 0, sizeof(lanes));
      block_fn(factor.data(), seed, i0, i0, i1, lanes);
      block_sums[b] = fold_lanes(lanes, i1 - i0);
    }
  };

  const uint64_t workers =
      std::min<uint64_t>(std::max(threads, 1), n_blocks);
  if (workers <= 1) {
    run_blocks(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint64_t t = 0; t < workers; ++t)
      pool.emplace_back(run_blocks, t, workers);
    for (auto& th : pool) th.join();
  }
  return pairwise_reduce(block_sums);
}

void generate_displacements(const std::array<double, 36>& factor, uint64_t seed,
                            uint64_t begin, uint64_t end, double* out) {
  for (uint64_t i = begin; i < end; ++i) {
    const auto z = standard_normal6(seed, i);
    double* row = out + 6 * (i - begin);
    for (int p = 0; p < 6; ++p) {
      double acc = factor[6 * p] * z[0];
      for (int q = 1; q < 6; ++q) acc = std::fma(factor[6 * p + q], z[q], acc);
      row[p] = acc;
    }
  }
}

}  // namespace gdist::kernels
