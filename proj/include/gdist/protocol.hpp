#pragma once

#include <optional>

#include "gdist/symplectic.hpp"
#include "gdist/types.hpp"

namespace gdist {

/// Protocol parameterization (d, r, x) with the derived quantities that
/// appear everywhere downstream. Requires d >= r > 0 and x >= 0.
struct ProtocolParams {
  double d = 0.0;
  double r = 0.0;
  double x = 0.0;
  // derived
  double a = 0.0;      // cosh 2r
  double c = 0.0;      // sinh 2r
  double phi = 0.0;    // noise-vector angle, in (0, pi/2)
  double delta = 0.0;  // e^{2d} sin^2 phi + e^{-2d} cos^2 phi
  double x_sep = 0.0;  // full-separability bound

  ProtocolParams(double d, double r, double x);

  /// From the input-port position variances vA = e^{2(d-r)}, vB = e^{2(d+r)}.
  /// Requires vB > vA >= 1.
  static ProtocolParams from_variances(double va, double vb, double x);

  double va() const { return std::exp(2.0 * (d - r)); }
  double vb() const { return std::exp(2.0 * (d + r)); }
};

/// The single-mode ansatz states of the full-separability witness: two
/// pure squeezed/rotated modes and the vacuum ancilla, plus their
/// parameters.
struct LocalStateSet {
  CovarianceMatrix gamma_a;
  CovarianceMatrix gamma_b;
  CovarianceMatrix gamma_c;
  double alpha = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double squeeze = 0.0;  // s with gamma_A ~ rotated diag(e^{2s}, e^{-2s})
  double theta = 0.0;    // rotation angle, radians

  CovarianceMatrix product() const;  // gamma_A + gamma_B + gamma_C (direct sum)
};

/// Witness matrix Q(x) = gamma1(x) - gamma_A + gamma_B + gamma_C together
/// with its eigenvalues and the beam-splitter-rotated eigenvalues used by
/// the closed-form check.
struct QMatrixResult {
  Eigen::MatrixXd q;
  TriState psd = TriState::boundary;
  std::vector<double> eigenvalues;          // of Q, ascending
  std::vector<double> rotated_eigenvalues;  // of U_AB Q U_AB^T, ascending
  double min_eigenvalue = 0.0;
  double scale = 0.0;  // max |Q| entry, the PSD tolerance reference
};

/// Result of fitting Sigma(x) = x(ux + v) and solving for the zero
/// crossing. `x_th` is present only when u > 0 and v < 0 (upward parabola
/// with one positive root). When u < 0 and v > 0, Sigma >= 0 only on the
/// bounded interval [0, -v/u], reported as `sigma_nonneg_until`.
struct ThresholdFit {
  double u = 0.0;
  double v = 0.0;
  std::optional<double> x_th;
  std::optional<double> sigma_nonneg_until;
};

/// Everything the protocol evaluation produces at one parameter point.
struct ProtocolReport {
  ProtocolParams params;
  CovarianceMatrix gamma1;
  CovarianceMatrix gamma2;
  CovarianceMatrix gamma3;
  std::vector<SeparabilityVerdict> verdicts;
  double nu = 0.0;                   // lower PT symplectic eigenvalue of A-B
  std::optional<double> nu_m;        // after homodyne conditioning on C
  ThresholdFit threshold;            // step-2 Sigma parabola
  double sigma_step2_c = 0.0;
  double sigma_step2_b = 0.0;
  double sigma_step3_c = 0.0;
  double ppt_step2_a = 0.0;          // PPT nu for A|(BC) after step 2
  std::vector<std::string> flags;
};

/// Two-mode CM of Eq.-style block structure used as the analytic
/// cross-check of the numeric pipeline.
struct ReducedBlocks {
  Eigen::Matrix2d a;
  Eigen::Matrix2d b;
  Eigen::Matrix2d c;

  Eigen::Matrix4d assemble() const;
};

/// CM of the initial two-mode squeezed state with local squeezers,
///   [[ e^{2d} a, ., -e^{2d} c, .], ...]  with a = cosh 2r, c = sinh 2r.
CovarianceMatrix make_gamma_ab(double d, double r);

/// Noise directions q1, q2 and the angle phi with
/// tan(phi) = e^{-2r} sinh(2d) + sqrt(1 + e^{-4r} sinh^2(2d)).
struct NoiseVectors {
  Eigen::Vector<double, 6> q1;
  Eigen::Vector<double, 6> q2;
  double phi;
};
NoiseVectors make_noise_vectors(double d, double r);

/// gamma1(x) = gamma_AB + 1_C + x (q1 q1^T + q2 q2^T). Physical for all
/// x >= 0.
CovarianceMatrix make_gamma1(double d, double r, double x);

/// x_sep = 2 sinh(2r) / delta.
double compute_x_sep(double d, double r);

/// Single-mode witness states (alpha, beta, tau ansatz); throws if the
/// purity identity alpha^2 = beta^2 + tau^2 + 1 fails beyond tol::purity.
LocalStateSet make_local_cms(double d, double r);

/// Witness matrix Q(x) and its PSD classification.
QMatrixResult make_q_matrix(double d, double r, double x);

/// Step 2: balanced beam splitter across modes A and C.
CovarianceMatrix run_step2(const CovarianceMatrix& gamma1);

/// Step 3: balanced beam splitter across modes B and C.
CovarianceMatrix run_step3(const CovarianceMatrix& gamma2);

/// Closed-form blocks of the reduced A-B state after step 3. Independent
/// of the transform pipeline; used as its oracle.
ReducedBlocks closed_form_reduced_ab(double d, double r, double x);

/// Lower PT symplectic eigenvalue of a two-mode CM from the block
/// determinants: nu = sqrt((kappa - sqrt(kappa^2 - 4 det gamma))/2) with
/// kappa = det A + det B - 2 det C.
double nu_ab(const CovarianceMatrix& gamma_ab);

/// Fit Sigma(x) = x(ux + v) for the given step (2 or 3) by evaluating the
/// pipeline at two x values and verifying the model at a third. Throws if
/// the quadratic model does not hold.
ThresholdFit find_x_threshold(double d, double r, int step_index);

/// Gaussian conditional state of the unmeasured modes after a homodyne
/// measurement of cos(angle) x + sin(angle) p on `mode`.
CovarianceMatrix homodyne_condition(const CovarianceMatrix& gamma, int mode,
                                    double angle);

/// Full pipeline: gamma1 -> gamma2 -> gamma3 with every separability
/// verdict, the step-2 threshold and optionally the homodyne-conditioned
/// eigenvalue. Negative findings are verdicts, not errors.
ProtocolReport run_protocol(const ProtocolParams& params, bool with_measurement);

}  // namespace gdist
