#include "gdist/montecarlo.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gdist::mc {

std::array<double, 36> displacement_factor(const Eigen::MatrixXd& correlation) {
  if (correlation.rows() != 6 || correlation.cols() != 6)
    throw std::invalid_argument("displacement correlation must be 6x6");
  const double scale =
      std::max(correlation.cwiseAbs().maxCoeff(), 1e-300);
  if ((correlation - correlation.transpose()).cwiseAbs().maxCoeff() >
      tol::symmetry * std::max(1.0, scale))
    throw std::invalid_argument("displacement correlation must be symmetric");

  // Probability covariance is correlation/2 (CM-additive convention).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation / 2.0);
  Eigen::VectorXd ev = solver.eigenvalues();
  for (int i = 0; i < 6; ++i) {
    if (ev(i) < -1e-9 * scale)
      throw std::invalid_argument(
          "displacement correlation is not positive semidefinite");
    ev(i) = std::max(0.0, ev(i));  // clip: Q(x_sep) is exactly rank-deficient
  }
  const Eigen::MatrixXd f = solver.eigenvectors() *
                            ev.cwiseSqrt().asDiagonal() *
                            solver.eigenvectors().transpose();
  std::array<double, 36> out;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) out[6 * p + q] = f(p, q);
  return out;
}

DisplacementEnsemble sample_displacements(const Eigen::MatrixXd& correlation,
                                          uint64_t n, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  const auto factor = displacement_factor(correlation);
  DisplacementEnsemble out;
  out.seed = seed;
  out.target_correlation = correlation;
  out.samples.resize(n);
  kernels::generate_displacements(factor, seed, 0, n, out.samples[0].data());
  return out;
}

CmEstimate simulate_preparation(const ProtocolParams& params, uint64_t n,
                                uint64_t seed, kernels::Kernel kernel,
                                int threads) {
  if (n < 2) throw std::invalid_argument("need n >= 2 for the CM estimate");
  const CovarianceMatrix gamma_pure =
      make_local_cms(params.d, params.r).product();
  const auto q = make_q_matrix(params.d, params.r, params.x);
  const auto factor = displacement_factor(q.q);

  const auto sums =
      kernels::accumulate_displacement_moments(factor, seed, 0, n, kernel, threads);

  Eigen::Vector<double, 6> mean;
  for (int i = 0; i < 6; ++i) mean(i) = sums.sum[i] / static_cast<double>(n);

  Eigen::Matrix<double, 6, 6> second;
  int k = 0;
  for (int p = 0; p < 6; ++p)
    for (int q2 = p; q2 < 6; ++q2, ++k) second(p, q2) = second(q2, p) = sums.outer[k];

  // Unbiased classical covariance of the displacements; the mixture CM is
  // the pure CM plus twice that.
  const Eigen::Matrix<double, 6, 6> cov =
      (second - static_cast<double>(n) * (mean * mean.transpose())) /
      static_cast<double>(n - 1);

  CmEstimate est{mean, CovarianceMatrix(3, gamma_pure.mat() + 2.0 * cov), n};
  const double target_scale =
      make_gamma1(params.d, params.r, params.x).mat().cwiseAbs().maxCoeff();
  est.stderr_scale = target_scale * std::sqrt(2.0 / static_cast<double>(n));
  return est;
}

SimonVerdict verify_simon(const Eigen::Matrix4d& gamma_ab_estimate,
                          double stderr_scale) {
  const Eigen::Matrix4d sym =
      (gamma_ab_estimate + gamma_ab_estimate.transpose()) / 2.0;
  const CovarianceMatrix gamma(2, sym);
  SimonVerdict out{{3, "A|B", ModePartition({0}, {1}, 2), Criterion::ppt, 0.0,
                    TriState::boundary}};
  out.verdict.statistic = nu_ab(gamma);
  out.verdict.separable = classify_statistic(out.verdict.statistic, 1.0);
  const double min_nu = symplectic_eigenvalues(sym).front();
  out.flagged_unphysical = min_nu < 1.0 - 3.0 * stderr_scale - tol::physical;
  return out;
}

}  // namespace gdist::mc
