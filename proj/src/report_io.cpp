#include "gdist/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gdist::io {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json to_json(const SeparabilityVerdict& v) {
  return {{"stage", v.stage},
          {"partition", v.label},
          {"criterion", to_string(v.criterion)},
          {"statistic", v.statistic},
          {"separable", to_string(v.separable)}};
}

nlohmann::json to_json(const ProtocolReport& report) {
  const auto& p = report.params;
  nlohmann::json j{
      {"params",
       {{"d", p.d},
        {"r", p.r},
        {"x", p.x},
        {"va", p.va()},
        {"vb", p.vb()},
        {"a", p.a},
        {"c", p.c},
        {"phi", p.phi},
        {"delta", p.delta},
        {"x_sep", p.x_sep}}},
      {"gamma1", matrix_json(report.gamma1.mat())},
      {"gamma2", matrix_json(report.gamma2.mat())},
      {"gamma3", matrix_json(report.gamma3.mat())},
      {"nu", report.nu},
      {"log_negativity", log_negativity(report.nu)},
      {"u", report.threshold.u},
      {"v", report.threshold.v},
      {"sigma_step2_c", report.sigma_step2_c},
      {"sigma_step2_b", report.sigma_step2_b},
      {"sigma_step3_c", report.sigma_step3_c},
      {"ppt_step2_a", report.ppt_step2_a},
      {"flags", report.flags},
  };
  j["nu_m"] = report.nu_m ? nlohmann::json(*report.nu_m) : nlohmann::json();
  j["x_th"] = report.threshold.x_th ? nlohmann::json(*report.threshold.x_th)
                                    : nlohmann::json();
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : report.verdicts) verdicts.push_back(to_json(v));
  j["verdicts"] = std::move(verdicts);
  return j;
}

nlohmann::json to_json(const SweepRecord& rec) {
  nlohmann::json j{{"va", rec.va}, {"vb", rec.vb}, {"status", to_string(rec.status)}};
  auto set = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json();
  };
  set("d", rec.d);
  set("r", rec.r);
  set("x_sep", rec.x_sep);
  set("x_th", rec.x_th);
  set("x_used", rec.x_used);
  set("nu", rec.nu);
  set("sigma_step2", rec.sigma_step2);
  set("sigma_step3", rec.sigma_step3);
  return j;
}

std::string protocol_csv(const ProtocolReport& report) {
  const auto& p = report.params;
  std::string out =
      "d,r,x,va,vb,x_sep,x_th,u,v,nu,nu_m,log_negativity,sigma_step2_c,"
      "sigma_step2_b,ppt_step2_a,sigma_step3_c,flags\n";
  std::vector<std::string> fields = {
      format_double(p.d),
      format_double(p.r),
      format_double(p.x),
      format_double(p.va()),
      format_double(p.vb()),
      format_double(p.x_sep),
      opt_field(report.threshold.x_th),
      format_double(report.threshold.u),
      format_double(report.threshold.v),
      format_double(report.nu),
      opt_field(report.nu_m),
      format_double(log_negativity(report.nu)),
      format_double(report.sigma_step2_c),
      format_double(report.sigma_step2_b),
      format_double(report.ppt_step2_a),
      format_double(report.sigma_step3_c),
      join(report.flags, ";")};
  out += join(fields, ",") + "\n";
  return out;
}

std::string protocol_text(const ProtocolReport& report) {
  const auto& p = report.params;
  std::ostringstream os;
  os.precision(6);
  os << "parameters: d=" << p.d << " r=" << p.r << " x=" << p.x
     << "  (vA=" << p.va() << ", vB=" << p.vb() << ")\n";
  os << "x_sep=" << p.x_sep << "  Sigma(x)=x(ux+v): u=" << report.threshold.u
     << " v=" << report.threshold.v;
  if (report.threshold.x_th)
    os << "  x_th=" << *report.threshold.x_th;
  else if (report.threshold.sigma_nonneg_until)
    os << "  (Sigma >= 0 only for x <= " << *report.threshold.sigma_nonneg_until
       << ")";
  else
    os << "  (no positive threshold)";
  os << "\n";
  for (const auto& v : report.verdicts)
    os << "step " << v.stage << ": " << v.label << " [" << to_string(v.criterion)
       << "] statistic=" << v.statistic << " separable=" << to_string(v.separable)
       << "\n";
  os << "step 3 lower PT symplectic eigenvalue nu=" << report.nu
     << " (log-negativity " << log_negativity(report.nu) << ")\n";
  if (report.nu_m)
    os << "after homodyne of (x_C+p_C)/sqrt(2): nu_m=" << *report.nu_m << "\n";
  for (const auto& f : report.flags) os << "note: " << f << "\n";
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = "vA,vB,d,r,x_sep,x_th,x_used,nu,sigma_step2,sigma_step3,status\n";
  for (const auto& rec : records) {
    std::vector<std::string> fields = {
        format_double(rec.va),      format_double(rec.vb),
        opt_field(rec.d),           opt_field(rec.r),
        opt_field(rec.x_sep),       opt_field(rec.x_th),
        opt_field(rec.x_used),      opt_field(rec.nu),
        opt_field(rec.sigma_step2), opt_field(rec.sigma_step3),
        to_string(rec.status)};
    out += join(fields, ",") + "\n";
  }
  return out;
}

nlohmann::json sweep_json(const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : records) arr.push_back(to_json(rec));
  return arr;
}

std::vector<RobustnessRow> robustness_scan(const ProtocolParams& params,
                                           const std::vector<double>& epsilons) {
  const CovarianceMatrix gamma1 = make_gamma1(params.d, params.r, params.x);
  std::vector<RobustnessRow> rows;
  rows.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (eps < 0.0)
      throw std::invalid_argument("robustness epsilon must be >= 0");
    const CovarianceMatrix perturbed(
        3, gamma1.mat() + eps * Eigen::MatrixXd::Identity(6, 6));
    const CovarianceMatrix g2 = run_step2(perturbed);
    const CovarianceMatrix g3 = run_step3(g2);
    RobustnessRow row;
    row.epsilon = eps;
    row.nu = nu_ab(g3.reduced({0, 1}));
    row.sigma_step2_c = serafini_sigma(g2, 2);
    row.sigma_step2_b = serafini_sigma(g2, 1);
    row.sigma_step3_c = serafini_sigma(g3, 2);
    row.separable_c_step2 = classify_statistic(row.sigma_step2_c, 0.0);
    row.separable_c_step3 = classify_statistic(row.sigma_step3_c, 0.0);
    rows.push_back(row);
  }
  return rows;
}

std::string robustness_csv(const std::vector<RobustnessRow>& rows) {
  std::string out =
      "epsilon,nu,sigma_step2_c,sigma_step2_b,sigma_step3_c,"
      "separable_c_step2,separable_c_step3\n";
  for (const auto& row : rows) {
    std::vector<std::string> fields = {
        format_double(row.epsilon),        format_double(row.nu),
        format_double(row.sigma_step2_c),  format_double(row.sigma_step2_b),
        format_double(row.sigma_step3_c),  to_string(row.separable_c_step2),
        to_string(row.separable_c_step3)};
    out += join(fields, ",") + "\n";
  }
  return out;
}

nlohmann::json robustness_json(const std::vector<RobustnessRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows)
    arr.push_back({{"epsilon", row.epsilon},
                   {"nu", row.nu},
                   {"sigma_step2_c", row.sigma_step2_c},
                   {"sigma_step2_b", row.sigma_step2_b},
                   {"sigma_step3_c", row.sigma_step3_c},
                   {"separable_c_step2", to_string(row.separable_c_step2)},
                   {"separable_c_step3", to_string(row.separable_c_step3)}});
  return arr;
}

SampleReport make_sample_report(const ProtocolParams& params, uint64_t n,
                                uint64_t seed, kernels::Kernel kernel,
                                int threads) {
  SampleReport report{params,
                      mc::simulate_preparation(params, n, seed, kernel, threads)};
  report.seed = seed;
  report.kernel = kernels::kernel_name(kernel);

  const CovarianceMatrix gamma1 = make_gamma1(params.d, params.r, params.x);
  report.max_abs_deviation =
      (report.estimate.cm.mat() - gamma1.mat()).cwiseAbs().maxCoeff();
  report.deviation_over_stderr =
      report.max_abs_deviation / report.estimate.stderr_scale;
  // sqrt(2/n) > 0.05 means entrywise standard errors above 5% of the
  // target scale.
  report.reliable = std::sqrt(2.0 / static_cast<double>(n)) <= 0.05;
  if (!report.reliable)
    report.flags.push_back("estimate statistically unreliable (n too small)");

  const CovarianceMatrix g3_est = run_step3(run_step2(report.estimate.cm));
  const Eigen::Matrix4d ab = g3_est.reduced({0, 1}).mat();
  report.simon_step3 = mc::verify_simon(ab, report.estimate.stderr_scale);
  report.nu_estimate = report.simon_step3.verdict.statistic;
  if (report.simon_step3.flagged_unphysical)
    report.flags.push_back("estimated reduced CM unphysical beyond 3 stderr");
  return report;
}

nlohmann::json sample_json(const SampleReport& report) {
  std::vector<double> mean(report.estimate.mean_vector.data(),
                           report.estimate.mean_vector.data() + 6);
  return {{"params",
           {{"d", report.params.d},
            {"r", report.params.r},
            {"x", report.params.x}}},
          {"n", report.estimate.n},
          {"seed", report.seed},
          {"kernel", report.kernel},
          {"mean", mean},
          {"cm_estimate", matrix_json(report.estimate.cm.mat())},
          {"stderr_scale", report.estimate.stderr_scale},
          {"max_abs_deviation", report.max_abs_deviation},
          {"deviation_over_stderr", report.deviation_over_stderr},
          {"reliable", report.reliable},
          {"nu_estimate", report.nu_estimate},
          {"simon_step3", to_json(report.simon_step3.verdict)},
          {"flags", report.flags}};
}

std::string sample_csv(const SampleReport& report) {
  std::string out = "key,value\n";
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k + "," + v + "\n";
  };
  kv("d", format_double(report.params.d));
  kv("r", format_double(report.params.r));
  kv("x", format_double(report.params.x));
  kv("n", std::to_string(report.estimate.n));
  kv("seed", std::to_string(report.seed));
  kv("kernel", report.kernel);
  kv("stderr_scale", format_double(report.estimate.stderr_scale));
  kv("max_abs_deviation", format_double(report.max_abs_deviation));
  kv("deviation_over_stderr", format_double(report.deviation_over_stderr));
  kv("reliable", report.reliable ? "1" : "0");
  kv("nu_estimate", format_double(report.nu_estimate));
  kv("simon_separable", to_string(report.simon_step3.verdict.separable));
  kv("flags", join(report.flags, ";"));
  return out;
}

}  // namespace gdist::io
