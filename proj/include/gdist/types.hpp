#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdist {

// Numerical tolerances used throughout. These are part of the library
// contract, not tuning knobs.
namespace tol {
inline constexpr double symmetry = 1e-12;        // CM symmetry, relative
inline constexpr double symplectic = 1e-12;      // |S Omega S^T - Omega|_max
inline constexpr double physical = 1e-9;         // absolute on symplectic eigenvalues
inline constexpr double eig_pairing = 1e-8;      // pairing of eigenvalues of -(Omega M)^2
inline constexpr double odd_coeff = 1e-9;        // odd charpoly coefficients, relative
inline constexpr double boundary = 1e-7;         // verdict statistic vs threshold
inline constexpr double psd_witness = 1e-9;      // min eigenvalue of Q, relative to |Q|
inline constexpr double purity = 1e-8;           // alpha^2 = beta^2 + tau^2 + 1
inline constexpr double quadratic_fit = 1e-7;    // Sigma(x) = x(ux+v) model check
}  // namespace tol

/// 2n x 2n real symmetric covariance matrix over quadratures
/// (x1,p1,...,xn,pn), normalized so that the vacuum CM is the identity.
class CovarianceMatrix {
 public:
  CovarianceMatrix(int n_modes, Eigen::MatrixXd entries);

  static CovarianceMatrix vacuum(int n_modes);

  int n_modes() const { return n_modes_; }
  int dim() const { return 2 * n_modes_; }
  const Eigen::MatrixXd& mat() const { return m_; }

  /// Marginal CM of the listed modes, in the listed order.
  CovarianceMatrix reduced(const std::vector<int>& modes) const;

  /// Direct sum with another CM (this on top-left).
  CovarianceMatrix direct_sum(const CovarianceMatrix& other) const;

 private:
  int n_modes_;
  Eigen::MatrixXd m_;
};

/// 2n x 2n real matrix S with S Omega S^T = Omega. Encodes a Gaussian
/// unitary (beam splitter, squeezer, phase rotation) in phase space.
class SymplecticTransform {
 public:
  SymplecticTransform(int n_modes, Eigen::MatrixXd entries);

  static SymplecticTransform identity(int n_modes);

  int n_modes() const { return n_modes_; }
  int dim() const { return 2 * n_modes_; }
  const Eigen::MatrixXd& mat() const { return m_; }

 private:
  int n_modes_;
  Eigen::MatrixXd m_;
};

/// Bipartition of the modes of an n-mode system. `right` may be empty only
/// for the full-separability witness, where no bipartition applies.
struct ModePartition {
  std::vector<int> left;
  std::vector<int> right;

  ModePartition() : left{0}, n_modes_(1) {}  // trivial single-mode default
  ModePartition(std::vector<int> l, std::vector<int> r, int n_modes);

  /// "A|(BC)"-style label; letters for up to three modes, indices beyond.
  std::string label() const;

 private:
  int n_modes_;
};

/// Coefficients of det(M - y*1) = y^6 + I1 y^4 + I2 y^2 + I3 for the
/// 6x6 input. Odd-power coefficients are retained as diagnostics; they
/// must vanish for any Omega*CM-shaped matrix.
struct InvariantTriple {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double odd_residual = 0.0;  // max |odd coeff| relative to the even ones
};

enum class TriState { yes, no, boundary };

enum class Criterion { psd_witness, serafini, ppt };

std::string to_string(TriState s);
std::string to_string(Criterion c);

/// One separability claim: which cut, which test, the test statistic and
/// the resulting verdict. `boundary` means the statistic sits within
/// tol::boundary of the decision threshold and the test is inconclusive.
struct SeparabilityVerdict {
  int stage = 0;  // protocol step (1, 2 or 3)
  std::string label;
  ModePartition partition;
  Criterion criterion = Criterion::ppt;
  double statistic = 0.0;
  TriState separable = TriState::boundary;
};

}  // namespace gdist
