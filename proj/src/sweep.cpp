#include "gdist/sweep.hpp"

#include <cstdlib>
#include <thread>

namespace gdist {

void SweepSpec::validate() const {
  if (!(va_min > 0.0) || !(vb_min > 0.0) || !(va_min < va_max) ||
      !(vb_min < vb_max))
    throw std::invalid_argument("sweep ranges must be positive with min < max");
  if (va_steps < 2 || vb_steps < 2)
    throw std::invalid_argument("sweep needs at least 2 steps per axis");
  if (x_policy.kind == XPolicy::Kind::fixed && !(x_policy.value > 0.0))
    throw std::invalid_argument("fixed x policy needs x > 0");
  if (x_policy.kind == XPolicy::Kind::threshold_margin && !(x_policy.value >= 0.0))
    throw std::invalid_argument("threshold margin must be >= 0");
}

std::string to_string(SweepStatus s) {
  switch (s) {
    case SweepStatus::ok: return "ok";
    case SweepStatus::no_threshold: return "no-threshold";
    case SweepStatus::entangled_ancilla: return "entangled-ancilla";
    case SweepStatus::not_entangled: return "not-entangled";
    default: return "invalid-point";
  }
}

SweepRecord evaluate_sweep_point(double va, double vb, const XPolicy& policy) {
  SweepRecord rec;
  rec.va = va;
  rec.vb = vb;
  if (!(vb > va) || !(va >= 1.0)) {
    rec.status = SweepStatus::invalid_point;
    return rec;
  }
  const double d = (std::log(va) + std::log(vb)) / 4.0;
  const double r = (std::log(vb) - std::log(va)) / 4.0;
  rec.d = d;
  rec.r = r;
  rec.x_sep = compute_x_sep(d, r);

  const ThresholdFit fit = find_x_threshold(d, r, 2);
  if (fit.x_th) rec.x_th = *fit.x_th;

  const double x_used =
      policy.kind == XPolicy::Kind::fixed
          ? policy.value
          : (1.0 + policy.value) * std::max(fit.x_th.value_or(0.0), *rec.x_sep);
  rec.x_used = x_used;

  const CovarianceMatrix g1 = make_gamma1(d, r, x_used);
  const CovarianceMatrix g2 = run_step2(g1);
  const CovarianceMatrix g3 = run_step3(g2);
  rec.sigma_step2 = serafini_sigma(g2, 2);
  rec.sigma_step3 = serafini_sigma(g3, 2);
  rec.nu = nu_ab(g3.reduced({0, 1}));

  const auto q = make_q_matrix(d, r, x_used);
  const bool sep_ok =
      q.psd == TriState::yes &&
      classify_statistic(*rec.sigma_step2, 0.0) == TriState::yes &&
      classify_statistic(serafini_sigma(g2, 1), 0.0) == TriState::yes &&
      classify_statistic(*rec.sigma_step3, 0.0) == TriState::yes;

  if (!fit.x_th)
    rec.status = SweepStatus::no_threshold;
  else if (!sep_ok)
    rec.status = SweepStatus::entangled_ancilla;
  else if (classify_statistic(*rec.nu, 1.0) != TriState::no)  // nu not < 1
    rec.status = SweepStatus::not_entangled;
  else
    rec.status = SweepStatus::ok;
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const int n_points = spec.va_steps * spec.vb_steps;
  std::vector<SweepRecord> records(n_points);

  auto grid_value = [](double lo, double hi, int steps, int idx) {
    return lo + (hi - lo) * static_cast<double>(idx) /
                    static_cast<double>(steps - 1);
  };
  auto eval_range = [&](int first, int stride) {
    for (int p = first; p < n_points; p += stride) {
      const int ia = p / spec.vb_steps, ib = p % spec.vb_steps;
      records[p] = evaluate_sweep_point(
          grid_value(spec.va_min, spec.va_max, spec.va_steps, ia),
          grid_value(spec.vb_min, spec.vb_max, spec.vb_steps, ib),
          spec.x_policy);
    }
  };

  const int workers =
      std::max(1, std::min(threads > 0 ? threads : default_thread_count(),
                           n_points));
  if (workers == 1) {
    eval_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(eval_range, t, workers);
    for (auto& th : pool) th.join();
  }
  return records;
}

int default_thread_count() {
  if (const char* env = std::getenv("GAUSS_DISTILL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace gdist
