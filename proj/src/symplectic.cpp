#include "gdist/symplectic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gdist {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

void check_mode_index(int n_modes, int mode) {
  if (mode < 0 || mode >= n_modes)
    throw std::invalid_argument("mode index " + std::to_string(mode) +
                                " out of range for " + std::to_string(n_modes) +
                                " modes");
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(int n_modes, Eigen::MatrixXd entries)
    : n_modes_(n_modes), m_(std::move(entries)) {
  if (n_modes_ < 1) throw std::invalid_argument("n_modes must be >= 1");
  if (m_.rows() != 2 * n_modes_ || m_.cols() != 2 * n_modes_)
    throw std::invalid_argument("covariance matrix must be 2n x 2n");
  const double scale = std::max(1.0, max_abs(m_));
  if (max_abs(m_ - m_.transpose()) > tol::symmetry * scale)
    throw std::invalid_argument("covariance matrix is not symmetric");
  m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) {
  return CovarianceMatrix(n_modes,
                          Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix CovarianceMatrix::reduced(const std::vector<int>& modes) const {
  if (modes.empty()) throw std::invalid_argument("reduced: empty mode list");
  for (int m : modes) check_mode_index(n_modes_, m);
  const int k = static_cast<int>(modes.size());
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      out.block<2, 2>(2 * a, 2 * b) = m_.block<2, 2>(2 * modes[a], 2 * modes[b]);
  return CovarianceMatrix(k, std::move(out));
}

CovarianceMatrix CovarianceMatrix::direct_sum(const CovarianceMatrix& other) const {
  const int n = n_modes_ + other.n_modes_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.topLeftCorner(dim(), dim()) = m_;
  out.bottomRightCorner(other.dim(), other.dim()) = other.m_;
  return CovarianceMatrix(n, std::move(out));
}

SymplecticTransform::SymplecticTransform(int n_modes, Eigen::MatrixXd entries)
    : n_modes_(n_modes), m_(std::move(entries)) {
  if (n_modes_ < 1) throw std::invalid_argument("n_modes must be >= 1");
  if (m_.rows() != 2 * n_modes_ || m_.cols() != 2 * n_modes_)
    throw std::invalid_argument("symplectic transform must be 2n x 2n");
  const Eigen::MatrixXd omega = symplectic_form(n_modes_);
  if (max_abs(m_ * omega * m_.transpose() - omega) > tol::symplectic)
    throw std::invalid_argument("matrix does not satisfy S Omega S^T = Omega");
}

SymplecticTransform SymplecticTransform::identity(int n_modes) {
  return SymplecticTransform(
      n_modes, Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

ModePartition::ModePartition(std::vector<int> l, std::vector<int> r, int n_modes)
    : left(std::move(l)), right(std::move(r)), n_modes_(n_modes) {
  std::vector<bool> seen(n_modes_, false);
  for (const auto* side : {&left, &right})
    for (int m : *side) {
      check_mode_index(n_modes_, m);
      if (seen[m])
        throw std::invalid_argument("partition sides are not disjoint");
      seen[m] = true;
    }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw std::invalid_argument("partition does not cover all modes");
  if (left.empty()) throw std::invalid_argument("left side of partition is empty");
}

std::string ModePartition::label() const {
  auto name = [this](int m) {
    return n_modes_ <= 3 ? std::string(1, static_cast<char>('A' + m))
                         : std::to_string(m);
  };
  auto side = [&](const std::vector<int>& s) {
    std::string out;
    for (int m : s) out += name(m);
    return s.size() > 1 ? "(" + out + ")" : out;
  };
  if (right.empty()) {
    std::string out;
    for (size_t i = 0; i < left.size(); ++i)
      out += (i ? "|" : "") + name(left[i]);
    return out;  // "A|B|C": full separability
  }
  return side(left) + "|" + side(right);
}

std::string to_string(TriState s) {
  switch (s) {
    case TriState::yes: return "yes";
    case TriState::no: return "no";
    default: return "boundary";
  }
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::psd_witness: return "psd-witness";
    case Criterion::serafini: return "serafini";
    default: return "ppt";
  }
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

SymplecticTransform balanced_beamsplitter(int n_modes, int mode_i, int mode_j) {
  check_mode_index(n_modes, mode_i);
  check_mode_index(n_modes, mode_j);
  if (mode_i == mode_j)
    throw std::invalid_argument("beam splitter needs two distinct modes");
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  const double c = 1.0 / std::sqrt(2.0);
  for (int q = 0; q < 2; ++q) {  // x then p
    const int a = 2 * mode_i + q, b = 2 * mode_j + q;
    s(a, a) = c;
    s(a, b) = -c;
    s(b, a) = c;
    s(b, b) = c;
  }
  return SymplecticTransform(n_modes, std::move(s));
}

SymplecticTransform local_gaussian(int n_modes, int mode, double squeeze,
                                   double rotation_angle) {
  check_mode_index(n_modes, mode);
  Eigen::Matrix2d rot;
  rot << std::cos(rotation_angle), std::sin(rotation_angle),
      -std::sin(rotation_angle), std::cos(rotation_angle);
  Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(squeeze), std::exp(-squeeze))
                           .asDiagonal();
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * mode, 2 * mode) = rot * sq;
  return SymplecticTransform(n_modes, std::move(s));
}

CovarianceMatrix apply_transform(const SymplecticTransform& s,
                                 const CovarianceMatrix& gamma) {
  if (s.n_modes() != gamma.n_modes())
    throw std::invalid_argument("transform / CM mode count mismatch");
  return CovarianceMatrix(gamma.n_modes(),
                          s.mat() * gamma.mat() * s.mat().transpose());
}

Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& m,
                                  const std::vector<int>& modes) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw std::invalid_argument("partial transpose needs a 2n x 2n matrix");
  const int n = static_cast<int>(m.rows()) / 2;
  if (modes.empty())
    throw std::invalid_argument("partial transpose: empty mode set");
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(2 * n);
  for (int mode : modes) {
    check_mode_index(n, mode);
    flip(2 * mode + 1) = -1.0;
  }
  return flip.asDiagonal() * m * flip.asDiagonal();
}

Eigen::MatrixXd partial_transpose(const CovarianceMatrix& gamma,
                                  const std::vector<int>& modes) {
  return partial_transpose(gamma.mat(), modes);
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw std::invalid_argument("symplectic_eigenvalues needs a 2n x 2n matrix");
  const int n = static_cast<int>(m.rows()) / 2;
  const Eigen::MatrixXd om = symplectic_form(n) * m;
  const Eigen::MatrixXd b = -(om * om);  // spectrum {nu_k^2}, each doubled
  Eigen::EigenSolver<Eigen::MatrixXd> solver(b, /*computeEigenvectors=*/false);
  const double scale = std::max(1.0, max_abs(b));
  std::vector<double> ev;
  ev.reserve(2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    const auto lambda = solver.eigenvalues()(i);
    if (std::abs(lambda.imag()) > tol::eig_pairing * scale)
      throw std::runtime_error(
          "symplectic_eigenvalues: complex eigenvalue of -(Omega M)^2; "
          "input not a symmetric CM-like matrix");
    ev.push_back(lambda.real());
  }
  std::sort(ev.begin(), ev.end());
  std::vector<double> nus(n);
  for (int k = 0; k < n; ++k) {
    const double a = ev[2 * k], b2 = ev[2 * k + 1];
    if (std::abs(a - b2) > tol::eig_pairing * std::max({1.0, std::abs(a), std::abs(b2)}))
      throw std::runtime_error(
          "symplectic_eigenvalues: eigenvalue pairing failed");
    nus[k] = std::sqrt(std::max(0.0, 0.5 * (a + b2)));
  }
  return nus;
}

InvariantTriple characteristic_invariants(const Eigen::MatrixXd& m) {
  if (m.rows() != 6 || m.cols() != 6)
    throw std::invalid_argument("characteristic_invariants expects 6x6 input");
  const Eigen::MatrixXd om = symplectic_form(3) * m;
  // Faddeev-LeVerrier: p(y) = det(y 1 - Omega M) = y^6 + c5 y^5 + ... + c0.
  Eigen::MatrixXd mk = om;
  double c[7];
  c[6] = 1.0;
  for (int k = 1; k <= 6; ++k) {
    if (k > 1) mk = (om * (mk + c[7 - k] * Eigen::MatrixXd::Identity(6, 6))).eval();
    c[6 - k] = -mk.trace() / k;
  }
  InvariantTriple inv;
  inv.i1 = c[4];
  inv.i2 = c[2];
  inv.i3 = c[0];
  const double even_scale =
      std::max({1.0, std::abs(inv.i1), std::abs(inv.i2), std::abs(inv.i3)});
  inv.odd_residual =
      std::max({std::abs(c[5]), std::abs(c[3]), std::abs(c[1])}) / even_scale;
  if (inv.odd_residual > tol::odd_coeff)
    throw std::runtime_error(
        "characteristic_invariants: odd-power coefficients do not vanish; "
        "input is not of the form Omega * symmetric");
  return inv;
}

double serafini_sigma(const CovarianceMatrix& gamma, int single_mode) {
  if (gamma.n_modes() != 3)
    throw std::invalid_argument("serafini_sigma is defined for 3-mode CMs");
  check_mode_index(3, single_mode);
  const Eigen::MatrixXd pt = partial_transpose(gamma, {single_mode});
  const InvariantTriple inv = characteristic_invariants(pt);
  return inv.i1 - inv.i2 + inv.i3 - 1.0;
}

bool is_physical(const CovarianceMatrix& gamma) {
  const auto nus = symplectic_eigenvalues(gamma.mat());
  return nus.front() >= 1.0 - tol::physical;
}

double ppt_lowest_nu(const CovarianceMatrix& gamma,
                     const ModePartition& partition) {
  if (partition.right.empty())
    throw std::invalid_argument("ppt_lowest_nu needs a genuine bipartition");
  // Transposing either side yields the same symplectic spectrum; use the
  // smaller one.
  const auto& side = partition.left.size() <= partition.right.size()
                         ? partition.left
                         : partition.right;
  const auto nus = symplectic_eigenvalues(partial_transpose(gamma, side));
  return nus.front();
}

double log_negativity(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("log_negativity: nu must be > 0");
  return std::max(0.0, -std::log(nu));
}

TriState classify_statistic(double statistic, double threshold,
                            bool separable_if_geq) {
  if (std::abs(statistic - threshold) < tol::boundary) return TriState::boundary;
  const bool geq = statistic > threshold;
  return (geq == separable_if_geq) ? TriState::yes : TriState::no;
}

}  // namespace gdist
