// Acceptance suite: prints one PASS/FAIL line per criterion and returns
// the number of failures. Every tolerance is pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "gdist/montecarlo.hpp"
#include "gdist/report_io.hpp"
#include "gdist/sweep.hpp"

using namespace gdist;

namespace {

constexpr double kD = 0.27465307216702745;   // ln(3)/4
constexpr double kR = 0.071920518112945211;  // ln(4/3)/4
constexpr double kX = 1.041;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s %2d  %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  if (!ok) ++failures;
}

bool within(double value, double expected, double tolerance) {
  return std::abs(value - expected) <= tolerance;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace

int main() {
  const ProtocolParams params(kD, kR, kX);

  // 1. x_sep
  {
    const double x_sep = compute_x_sep(kD, kR);
    report(1, within(x_sep, 0.2043, 5e-4),
           fmt("x_sep=%.6f (expected 0.2043 +- 5e-4)", x_sep));
  }

  // 2. x_th from the Sigma parabola
  {
    const auto fit = find_x_threshold(kD, kR, 2);
    const bool ok = fit.x_th && within(*fit.x_th, 1.04, 0.01) && fit.u > 0.0 &&
                    fit.v < 0.0;
    report(2, ok,
           fmt("x_th=%.6f with u=%.6f>0, v=%.6f<0 (expected 1.04 +- 0.01)",
               fit.x_th.value_or(-1.0), fit.u, fit.v));
  }

  const CovarianceMatrix gamma1 = make_gamma1(kD, kR, kX);
  const CovarianceMatrix gamma2 = run_step2(gamma1);
  const CovarianceMatrix gamma3 = run_step3(gamma2);

  // 3. nu from the full pipeline
  {
    const double nu = ppt_lowest_nu(gamma3.reduced({0, 1}),
                                    ModePartition({0}, {1}, 2));
    report(3, within(nu, 0.9571, 5e-4),
           fmt("nu=%.6f (expected 0.9571 +- 5e-4)", nu));
  }

  // 4. Sigma-tilde at step 3 for mode C
  {
    const double sigma = serafini_sigma(gamma3, 2);
    report(4, within(sigma, 0.3957, 5e-4),
           fmt("sigma_step3=%.6f (expected 0.3957 +- 5e-4)", sigma));
  }

  // 5. nu_m after homodyne conditioning at pi/4 on C
  {
    const double nu_m = nu_ab(homodyne_condition(gamma3, 2, M_PI / 4.0));
    report(5, within(nu_m, 0.9421, 5e-4),
           fmt("nu_m=%.6f (expected 0.9421 +- 5e-4)", nu_m));
  }

  // 6. single-mode witness states: e^{-2s} and theta
  {
    const auto local = make_local_cms(kD, kR);
    const double e2s = std::exp(-2.0 * local.squeeze);
    const double theta_deg = local.theta * 180.0 / M_PI;
    const bool e2s_ok = within(e2s, 0.6387, 5e-4);
    const bool theta_printed_ok = within(theta_deg, 5.73, 0.1);
    // derived oracle value governs if the printed one is missed
    const bool theta_ok =
        theta_printed_ok || within(theta_deg, 5.685833398561, 1e-6);
    std::string detail = fmt("e^{-2s}=%.6f, theta=%.4f deg", e2s, theta_deg);
    if (!theta_printed_ok)
      detail += fmt(" [deviates from printed 5.73 by %.4f deg; derived oracle "
                    "5.6858 governs]",
                    std::abs(theta_deg - 5.73));
    report(6, e2s_ok && theta_ok, detail);
  }

  // 7. eigenvalues of the rotated witness at x_sep
  {
    const double x_sep = compute_x_sep(kD, kR);
    const auto q = make_q_matrix(kD, kR, x_sep);
    const double phi = make_noise_vectors(kD, kR).phi;
    const double l5 = 9.0 * x_sep;
    const double l6 = (std::exp(4 * kD) * std::pow(std::sin(phi), 2) +
                       std::exp(-4 * kD) * std::pow(std::cos(phi), 2)) * x_sep;
    bool ok = true;
    for (int i = 0; i < 4; ++i) ok &= std::abs(q.rotated_eigenvalues[i]) < 1e-9;
    ok &= within(q.rotated_eigenvalues[4], l6, 1e-9 * l6);
    ok &= within(q.rotated_eigenvalues[5], l5, 1e-9 * l5);
    report(7, ok,
           fmt("U Q(x_sep) U^T eigenvalues: 4 x |.|<1e-9, %.6f (=9 x_sep), "
               "%.6f (analytic), rel tol 1e-9",
               q.rotated_eigenvalues[5], q.rotated_eigenvalues[4]));
  }

  // 8. robustness against isotropic noise on gamma1
  {
    const auto rows = io::robustness_scan(params, {0.02});
    report(8, within(rows[0].nu, 0.9787, 5e-4),
           fmt("nu=%.6f for gamma1 + 0.02*1 (expected 0.9787 +- 5e-4)",
               rows[0].nu));
  }

  // 9. separability ledger at the flagship point
  {
    const auto q = make_q_matrix(kD, kR, kX);
    const double s2c = serafini_sigma(gamma2, 2);
    const double s2b = serafini_sigma(gamma2, 1);
    const double ppt_a = ppt_lowest_nu(gamma2, ModePartition({0}, {1, 2}, 3));
    const double s3c = serafini_sigma(gamma3, 2);
    const double nu = nu_ab(gamma3.reduced({0, 1}));
    const bool ok = q.psd == TriState::yes && s2c > 0.0 && s2b >= 0.0 &&
                    ppt_a < 1.0 && s3c > 0.0 && nu < 1.0;
    report(9, ok,
           fmt("step1 witness %s; step2 Sigma_C=%.2e>0, Sigma_B=%.3f>=0, "
               "nu_A(BC)=%.4f<1; step3 Sigma_C=%.4f>0, nu=%.4f<1",
               to_string(q.psd).c_str(), s2c, s2b, ppt_a, s3c, nu));
  }

  // 10. closed-form reduced blocks vs the numeric pipeline
  {
    Timer timer;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> d_dist(0.05, 0.6);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    std::uniform_real_distribution<double> x_dist(0.0, 3.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const double d = d_dist(rng), r = d * frac(rng), x = x_dist(rng);
      const auto blocks = closed_form_reduced_ab(d, r, x);
      const auto g3ab = run_step3(run_step2(make_gamma1(d, r, x))).reduced({0, 1});
      worst = std::max(worst, max_abs(blocks.assemble() - g3ab.mat()));
    }
    const double elapsed = timer.seconds();
    report(10, worst < 1e-10 && elapsed < 1.0,
           fmt("closed-form vs pipeline, 100 random points: max dev %.2e "
               "(< 1e-10), %.2f s (< 1 s)",
               worst, elapsed));
  }

  // 11. property suite on randomized instances
  {
    Timer timer;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> nu_dist(1.0, 2.5);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    std::uniform_real_distribution<double> squeeze(-0.5, 0.5);
    std::uniform_int_distribution<int> mode3(0, 2);
    bool ok = true;
    std::string why;

    for (int rep = 0; rep < 100 && ok; ++rep) {
      // random symplectic and physical CM
      Eigen::MatrixXd s = Eigen::MatrixXd::Identity(6, 6);
      for (int k = 0; k < 6; ++k) {
        if (k % 2 == 1) {
          int i = mode3(rng), j = mode3(rng);
          while (j == i) j = mode3(rng);
          s = balanced_beamsplitter(3, i, j).mat() * s;
        } else {
          s = local_gaussian(3, mode3(rng), squeeze(rng), angle(rng)).mat() * s;
        }
      }
      const Eigen::MatrixXd omega = symplectic_form(3);
      if (max_abs(s * omega * s.transpose() - omega) > 1e-12) {
        ok = false;
        why = "S Omega S^T identity";
        break;
      }
      Eigen::VectorXd diag(6);
      for (int k = 0; k < 3; ++k) {
        const double nu = nu_dist(rng);
        diag(2 * k) = nu;
        diag(2 * k + 1) = nu;
      }
      const CovarianceMatrix gamma(3, s * diag.asDiagonal() * s.transpose());

      // det and spectrum invariance under a further transform
      const SymplecticTransform extra(3, balanced_beamsplitter(3, 0, 2).mat() *
                                             local_gaussian(3, 1, 0.3, 1.1).mat());
      const auto moved = apply_transform(extra, gamma);
      if (std::abs(moved.mat().determinant() - gamma.mat().determinant()) >
          1e-9 * std::abs(gamma.mat().determinant())) {
        ok = false;
        why = "det invariance";
        break;
      }
      const auto nus_a = symplectic_eigenvalues(gamma.mat());
      const auto nus_b = symplectic_eigenvalues(moved.mat());
      for (int k = 0; k < 3; ++k)
        if (std::abs(nus_a[k] - nus_b[k]) > 1e-9 * nus_a[k]) {
          ok = false;
          why = "spectrum invariance";
        }
      if (!ok) break;

      // invariants vs eigenvalue reconstruction and I3 = det
      const Eigen::MatrixXd pt = partial_transpose(gamma, {2});
      const auto inv = characteristic_invariants(pt);
      const auto nus = symplectic_eigenvalues(pt);
      const double s0 = nus[0] * nus[0], s1 = nus[1] * nus[1],
                   s2 = nus[2] * nus[2];
      const double scale = std::max(1.0, std::abs(inv.i2));
      if (std::abs(inv.i1 - (s0 + s1 + s2)) > 1e-8 * scale ||
          std::abs(inv.i2 - (s0 * s1 + s0 * s2 + s1 * s2)) > 1e-8 * scale ||
          std::abs(inv.i3 - s0 * s1 * s2) > 1e-8 * scale) {
        ok = false;
        why = "invariant cross-validation";
        break;
      }
      if (std::abs(inv.i3 - gamma.mat().determinant()) >
          1e-9 * std::max(1.0, std::abs(inv.i3))) {
        ok = false;
        why = "I3 = det gamma";
        break;
      }
    }

    // Sigma-parabola: 2-point fit predicts a held-out 4th point
    std::uniform_real_distribution<double> d_dist(0.05, 0.6);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    for (int rep = 0; rep < 100 && ok; ++rep) {
      const double d = d_dist(rng), r = d * frac(rng);
      const auto fit = find_x_threshold(d, r, 2);  // verifies a 3rd point itself
      const double x4 = 2.0;
      const double actual = serafini_sigma(run_step2(make_gamma1(d, r, x4)), 2);
      const double predicted = x4 * (fit.u * x4 + fit.v);
      const double scale =
          std::max({std::abs(actual), std::abs(fit.u) * x4 * x4, 1e-12});
      if (std::abs(predicted - actual) > 1e-7 * scale) {
        ok = false;
        why = "Sigma parabola 4th point";
      }
    }

    const double elapsed = timer.seconds();
    ok = ok && elapsed < 10.0;
    report(11, ok,
           ok ? fmt("symplectic identity, det/spectrum invariance, invariant "
                    "cross-validation, I3=det, Sigma parabola: 100 instances "
                    "each, %.2f s (< 10 s)",
                    elapsed)
              : "property failed: " + why);
  }

  // 12. Monte Carlo convergence and error scaling
  {
    Timer timer;
    const Eigen::MatrixXd target = gamma1.mat();

    const auto est = mc::simulate_preparation(params, 1000000, 1,
                                              kernels::Kernel::auto_select,
                                              default_thread_count());
    const double dev = max_abs(est.cm.mat() - target);
    const bool converged = dev < 5.0 * est.stderr_scale;

    // slope of log error vs log n, geometric mean over 5 seeds per n
    std::vector<double> log_n, log_err;
    for (double n : {1e3, 1e4, 1e5, 1e6}) {
      double acc = 0.0;
      for (uint64_t seed = 101; seed <= 105; ++seed) {
        const auto e = mc::simulate_preparation(
            params, static_cast<uint64_t>(n), seed,
            kernels::Kernel::auto_select, default_thread_count());
        acc += std::log10(max_abs(e.cm.mat() - target));
      }
      log_n.push_back(std::log10(n));
      log_err.push_back(acc / 5.0);
    }
    double mx = 0, my = 0, mxx = 0, mxy = 0;
    const double m = static_cast<double>(log_n.size());
    for (size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_err[i];
      mxx += log_n[i] * log_n[i];
      mxy += log_n[i] * log_err[i];
    }
    const double slope = (m * mxy - mx * my) / (m * mxx - mx * mx);
    const bool slope_ok = std::abs(slope + 0.5) <= 0.15;

    const double elapsed = timer.seconds();
    report(12, converged && slope_ok && elapsed < 60.0,
           fmt("n=1e6 max dev %.2e (< 5 stderr = %.2e); slope %.3f "
               "(-0.5 +- 0.15); %.1f s (< 60 s)",
               dev, 5.0 * est.stderr_scale, slope, elapsed));
  }

  // 13. default sweep: regions, flagship membership, determinism
  {
    Timer timer;
    const SweepSpec spec;  // 81x81, vA in [1,3], vB in [1,4], margin 1e-3
    const auto records = run_sweep(spec, default_thread_count());
    const auto csv_a = io::sweep_csv(records);
    const auto csv_b = io::sweep_csv(run_sweep(spec, 2));

    int n_ok = 0, n_non_ok = 0;
    const SweepRecord* nearest = nullptr;
    double best = 1e300;
    for (const auto& rec : records) {
      (rec.status == SweepStatus::ok ? n_ok : n_non_ok)++;
      const double dist = std::hypot(rec.va - 1.5, rec.vb - 2.0);
      if (dist < best) {
        best = dist;
        nearest = &rec;
      }
    }
    const bool flagship_ok = nearest && nearest->status == SweepStatus::ok;
    const double elapsed = timer.seconds();
    report(13,
           n_ok > 0 && n_non_ok > 0 && flagship_ok && csv_a == csv_b &&
               elapsed < 30.0,
           fmt("81x81 grid: %d ok / %d non-ok; nearest to (1.5,2.0) at "
               "(%.4f,%.4f) status %s, nu=%.4f; reruns byte-identical: %s; "
               "%.1f s (< 30 s)",
               n_ok, n_non_ok, nearest ? nearest->va : 0.0,
               nearest ? nearest->vb : 0.0,
               nearest ? to_string(nearest->status).c_str() : "none",
               nearest && nearest->nu ? *nearest->nu : -1.0,
               csv_a == csv_b ? "yes" : "no", elapsed));
  }

  std::printf("%d of 13 criteria passed\n", 13 - failures);
  return failures;
}
