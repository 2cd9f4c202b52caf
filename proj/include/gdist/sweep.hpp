#pragma once

#include <optional>
#include <vector>

#include "gdist/protocol.hpp"

namespace gdist {

/// Noise-strength policy for sweep points: either a fixed x for every
/// point, or x = (1 + margin) * max(x_th, x_sep) per point.
struct XPolicy {
  enum class Kind { fixed, threshold_margin };
  Kind kind = Kind::threshold_margin;
  double value = 1e-3;  // the fixed x, or the margin

  static XPolicy fixed(double x) { return {Kind::fixed, x}; }
  static XPolicy threshold_margin(double eps) {
    return {Kind::threshold_margin, eps};
  }
};

/// Grid over the input-port variances vA = e^{2(d-r)}, vB = e^{2(d+r)}.
struct SweepSpec {
  double va_min = 1.0, va_max = 3.0;
  double vb_min = 1.0, vb_max = 4.0;
  int va_steps = 81;
  int vb_steps = 81;
  XPolicy x_policy = XPolicy::threshold_margin(1e-3);

  void validate() const;
};

enum class SweepStatus {
  ok,                 // every separability assumption holds and nu < 1
  no_threshold,       // Sigma parabola has no positive upward root
  entangled_ancilla,  // some stage fails a separability verdict
  not_entangled,      // assumptions hold but nu >= 1
  invalid_point,      // grid point violates vB > vA >= 1
};

std::string to_string(SweepStatus s);

struct SweepRecord {
  double va = 0.0, vb = 0.0;
  std::optional<double> d, r, x_sep, x_th, x_used, nu, sigma_step2, sigma_step3;
  SweepStatus status = SweepStatus::invalid_point;
};

/// Evaluate one grid point (exposed for tests and the robustness scan).
SweepRecord evaluate_sweep_point(double va, double vb, const XPolicy& policy);

/// Row-major sweep (vA outer, vB inner), deterministic ordering and values
/// regardless of `threads`.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int threads = 0);

/// GAUSS_DISTILL_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

}  // namespace gdist
