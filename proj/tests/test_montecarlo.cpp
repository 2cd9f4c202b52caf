#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gdist/montecarlo.hpp"
#include "test_util.hpp"

using namespace gdist;
using gdist_test::kFlagD;
using gdist_test::kFlagR;
using gdist_test::kFlagX;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("displacement factor") {
  // zero correlation -> zero factor -> all-zero samples
  const auto zero = mc::sample_displacements(Eigen::MatrixXd::Zero(6, 6), 32, 1);
  for (const auto& s : zero.samples)
    for (double v : s) CHECK(v == 0.0);

  // F F^T = correlation / 2
  const auto q = make_q_matrix(kFlagD, kFlagR, kFlagX);
  const auto f = mc::displacement_factor(q.q);
  Eigen::MatrixXd fm(6, 6);
  for (int p = 0; p < 6; ++p)
    for (int c = 0; c < 6; ++c) fm(p, c) = f[6 * p + c];
  CHECK(max_abs(fm * fm.transpose() - q.q / 2.0) < 1e-12);

  // rank-deficient Q(x_sep) must be accepted (eigen-clip)
  const auto q_sep =
      make_q_matrix(kFlagD, kFlagR, compute_x_sep(kFlagD, kFlagR));
  CHECK_NOTHROW(mc::displacement_factor(q_sep.q));

  // genuinely indefinite input is rejected
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(6, 6);
  bad(5, 5) = -0.1;
  CHECK_THROWS_AS(mc::displacement_factor(bad), std::invalid_argument);
}

TEST_CASE("sample_displacements determinism") {
  const auto q = make_q_matrix(kFlagD, kFlagR, kFlagX);
  const auto a = mc::sample_displacements(q.q, 64, 9);
  const auto b = mc::sample_displacements(q.q, 64, 9);
  const auto c = mc::sample_displacements(q.q, 64, 10);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK_THROWS_AS(mc::sample_displacements(q.q, 0, 1), std::invalid_argument);
}

TEST_CASE("displacement noise adds the target correlation to the CM") {
  // The CM-additive convention (probability covariance = correlation/2)
  // is the one easy-to-miss factor; check it statistically.
  const auto q = make_q_matrix(kFlagD, kFlagR, kFlagX);
  const uint64_t n = 200000;
  const auto ens = mc::sample_displacements(q.q, n, 3);
  Eigen::Vector<double, 6> mean = Eigen::Vector<double, 6>::Zero();
  for (const auto& s : ens.samples)
    for (int i = 0; i < 6; ++i) mean(i) += s[i];
  mean /= static_cast<double>(n);
  Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Zero();
  for (const auto& s : ens.samples) {
    Eigen::Vector<double, 6> y;
    for (int i = 0; i < 6; ++i) y(i) = s[i];
    cov += (y - mean) * (y - mean).transpose();
  }
  cov /= static_cast<double>(n - 1);
  const double stderr_scale =
      q.q.cwiseAbs().maxCoeff() * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(max_abs(2.0 * cov - q.q) < 5.0 * stderr_scale);
}

TEST_CASE("simulate_preparation") {
  const ProtocolParams params(kFlagD, kFlagR, kFlagX);

  // n = 2 smoke: runs and returns finite entries
  const auto tiny = mc::simulate_preparation(params, 2, 1);
  CHECK(tiny.cm.mat().allFinite());
  CHECK(tiny.n == 2);
  CHECK_THROWS_AS(mc::simulate_preparation(params, 1, 1), std::invalid_argument);

  // x = x_sep: rank-deficient correlation sampled without failure
  const ProtocolParams at_sep(kFlagD, kFlagR, compute_x_sep(kFlagD, kFlagR));
  CHECK_NOTHROW(mc::simulate_preparation(at_sep, 100, 1));

  // convergence at moderate n
  const uint64_t n = 200000;
  const auto est = mc::simulate_preparation(params, n, 1);
  const auto gamma1 = make_gamma1(kFlagD, kFlagR, kFlagX);
  CHECK(max_abs(est.cm.mat() - gamma1.mat()) < 5.0 * est.stderr_scale);
  CHECK(est.mean_vector.cwiseAbs().maxCoeff() < 0.05);

  // bit-identical reruns, also across kernels and thread counts
  const auto est2 = mc::simulate_preparation(params, 1000, 7);
  const auto est3 = mc::simulate_preparation(params, 1000, 7);
  CHECK(est2.cm.mat() == est3.cm.mat());
  const auto est_scalar = mc::simulate_preparation(params, 1000, 7,
                                                   kernels::Kernel::scalar, 1);
  const auto est_threads = mc::simulate_preparation(
      params, 1000, 7, kernels::Kernel::auto_select, 3);
  CHECK(est_scalar.cm.mat() == est_threads.cm.mat());
}

TEST_CASE("steps applied to the estimate converge to the analytic gamma3") {
  const ProtocolParams params(kFlagD, kFlagR, kFlagX);
  const uint64_t n = 200000;
  const auto est = mc::simulate_preparation(params, n, 5);
  const auto g3_est = run_step3(run_step2(est.cm));
  const auto g3 = run_step3(run_step2(make_gamma1(kFlagD, kFlagR, kFlagX)));
  CHECK(max_abs(g3_est.mat() - g3.mat()) < 5.0 * est.stderr_scale);
}

TEST_CASE("verify_simon") {
  // exact reduced state at the flagship point: entangled with nu ~ 0.9571
  const auto g3ab =
      run_step3(run_step2(make_gamma1(kFlagD, kFlagR, kFlagX))).reduced({0, 1});
  const auto exact = mc::verify_simon(g3ab.mat());
  CHECK(exact.verdict.statistic == doctest::Approx(0.9571).epsilon(5e-4));
  CHECK(exact.verdict.separable == TriState::no);
  CHECK(exact.verdict.criterion == Criterion::ppt);
  CHECK_FALSE(exact.flagged_unphysical);

  // two-mode vacuum: nu = 1, boundary-flagged
  const auto vac = mc::verify_simon(Eigen::Matrix4d::Identity());
  CHECK(vac.verdict.statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac.verdict.separable == TriState::boundary);

  // estimated state, end to end: entangled verdict at n = 10^5
  const ProtocolParams params(kFlagD, kFlagR, kFlagX);
  const auto est = mc::simulate_preparation(params, 100000, 11);
  const auto g3_est = run_step3(run_step2(est.cm));
  const auto verdict =
      mc::verify_simon(g3_est.reduced({0, 1}).mat(), est.stderr_scale);
  CHECK(verdict.verdict.separable == TriState::no);
}
