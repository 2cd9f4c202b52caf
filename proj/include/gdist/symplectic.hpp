#pragma once

#include <vector>

#include "gdist/types.hpp"

namespace gdist {

/// Symplectic form Omega = diag(J, ..., J) with J = [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int n_modes);

/// Balanced (50:50) beam splitter on modes (i, j), identity elsewhere:
///   x_i' = (x_i - x_j)/sqrt(2),  x_j' = (x_i + x_j)/sqrt(2)
/// and the same on p. Port order matters: the first argument is the port
/// that picks up the minus sign.
SymplecticTransform balanced_beamsplitter(int n_modes, int mode_i, int mode_j);

/// Single-mode Gaussian unitary R(theta) * diag(e^s, e^-s) embedded at
/// `mode`, with R(theta) = [[cos, sin],[-sin, cos]].
SymplecticTransform local_gaussian(int n_modes, int mode, double squeeze,
                                   double rotation_angle);

/// S gamma S^T.
CovarianceMatrix apply_transform(const SymplecticTransform& s,
                                 const CovarianceMatrix& gamma);

/// Lambda gamma Lambda with Lambda flipping the sign of p on each listed
/// mode. Returns a raw matrix: the result of transposing an entangled
/// state need not be a valid CM.
Eigen::MatrixXd partial_transpose(const CovarianceMatrix& gamma,
                                  const std::vector<int>& modes);
Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& m,
                                  const std::vector<int>& modes);

/// The n moduli nu_k >= 0 with spec(Omega M) = {+-i nu_k}, sorted
/// ascending. Computed from the real eigenvalues of -(Omega M)^2, which
/// come in pairs; a pairing failure beyond tol::eig_pairing signals a
/// non-symmetric or degenerate input and throws.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& m);

/// Symplectic invariants of the 6x6 matrix M (a possibly partially
/// transposed CM): the coefficients of det(Omega M - y*1) = y^6 + I1 y^4
/// + I2 y^2 + I3, computed by the Faddeev-LeVerrier trace recursion (no
/// eigendecomposition). Throws if the odd-power coefficients exceed
/// tol::odd_coeff relative to the even ones, which signals a
/// non-symmetric input.
InvariantTriple characteristic_invariants(const Eigen::MatrixXd& m);

/// Serafini 1x2-mode separability statistic for `single_mode` vs the rest:
/// Sigma = I1 - I2 + I3 - 1 of Omega gamma^{T_mode}. Sigma >= 0 means the
/// mode is separable from the other two.
double serafini_sigma(const CovarianceMatrix& gamma, int single_mode);

/// True iff the smallest symplectic eigenvalue is >= 1 - tol::physical
/// (the bona fide condition gamma + i Omega >= 0).
bool is_physical(const CovarianceMatrix& gamma);

/// Lowest symplectic eigenvalue of the partial transpose across the
/// partition. < 1 certifies entanglement; for 1x1- and 1x2-mode Gaussian
/// partitions >= 1 certifies separability.
double ppt_lowest_nu(const CovarianceMatrix& gamma,
                     const ModePartition& partition);

/// max(0, -ln nu). Throws on nu <= 0.
double log_negativity(double nu);

/// Verdict helper shared by the criteria: classifies `statistic` against
/// `threshold` with the separable side given by `separable_if_geq`.
TriState classify_statistic(double statistic, double threshold,
                            bool separable_if_geq = true);

}  // namespace gdist
