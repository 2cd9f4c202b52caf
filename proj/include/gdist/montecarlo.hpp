#pragma once

#include <cstdint>
#include <vector>

#include "gdist/kernels.hpp"
#include "gdist/protocol.hpp"
#include "gdist/types.hpp"

namespace gdist::mc {

/// Correlated random displacements in quadrature units. With the vacuum CM
/// normalized to the identity, a classical displacement with probability
/// covariance M adds 2M to a state's CM, so samples are drawn with
/// probability covariance target_correlation / 2.
struct DisplacementEnsemble {
  std::vector<std::array<double, 6>> samples;
  uint64_t seed = 0;
  Eigen::MatrixXd target_correlation;
};

/// Ensemble-averaged CM estimate from a finite preparation run.
struct CmEstimate {
  Eigen::Vector<double, 6> mean_vector;
  CovarianceMatrix cm;
  uint64_t n = 0;
  double stderr_scale = 0.0;  // ~ |target|_max * sqrt(2/n)
};

/// Symmetric PSD factor F of correlation/2 (F F^T = correlation/2), with
/// eigenvalues inside [-1e-9 * |corr|, 0) clipped to zero. Throws on more
/// negative eigenvalues.
std::array<double, 36> displacement_factor(const Eigen::MatrixXd& correlation);

/// n i.i.d. zero-mean Gaussian 6-vectors whose displacement noise adds
/// `correlation` to a CM in expectation. Deterministic given seed.
DisplacementEnsemble sample_displacements(const Eigen::MatrixXd& correlation,
                                          uint64_t n, uint64_t seed);

/// Simulate the LOCC preparation: draw n displacement vectors correlated
/// like Q(x) on top of the pure product state gamma_A + gamma_B + gamma_C
/// and return the ensemble CM estimate. Expectation is exactly gamma1(x).
CmEstimate simulate_preparation(const ProtocolParams& params, uint64_t n,
                                uint64_t seed,
                                kernels::Kernel kernel = kernels::Kernel::auto_select,
                                int threads = 1);

/// Two-mode PPT (Simon) test on a CM estimate. Symmetrizes the input;
/// if the estimate looks unphysical beyond 3 standard errors the verdict
/// is still computed but `flagged` is set.
struct SimonVerdict {
  SeparabilityVerdict verdict;
  bool flagged_unphysical = false;
};
SimonVerdict verify_simon(const Eigen::Matrix4d& gamma_ab_estimate,
                          double stderr_scale = 0.0);

}  // namespace gdist::mc
