#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gdist/montecarlo.hpp"
#include "gdist/protocol.hpp"
#include "gdist/sweep.hpp"

namespace gdist::io {

/// Shortest-exact formatting is not enough for CSV (values must survive a
/// parse/print round trip), so numbers are printed with 17 significant
/// digits.
std::string format_double(double v);

nlohmann::json to_json(const SeparabilityVerdict& v);
nlohmann::json to_json(const ProtocolReport& report);
nlohmann::json to_json(const SweepRecord& rec);

/// Single-row CSV (with header) for one protocol run.
std::string protocol_csv(const ProtocolReport& report);

/// Human-readable step-by-step summary.
std::string protocol_text(const ProtocolReport& report);

/// Sweep table, schema:
/// vA,vB,d,r,x_sep,x_th,x_used,nu,sigma_step2,sigma_step3,status
/// with empty fields for absent values and LF line endings.
std::string sweep_csv(const std::vector<SweepRecord>& records);
nlohmann::json sweep_json(const std::vector<SweepRecord>& records);

struct RobustnessRow {
  double epsilon = 0.0;
  double nu = 0.0;
  double sigma_step2_c = 0.0;
  double sigma_step2_b = 0.0;
  double sigma_step3_c = 0.0;
  TriState separable_c_step2 = TriState::boundary;
  TriState separable_c_step3 = TriState::boundary;
};

/// Steps 2-3 on gamma1 + epsilon * 1 for each epsilon.
std::vector<RobustnessRow> robustness_scan(const ProtocolParams& params,
                                           const std::vector<double>& epsilons);

std::string robustness_csv(const std::vector<RobustnessRow>& rows);
nlohmann::json robustness_json(const std::vector<RobustnessRow>& rows);

/// Monte Carlo preparation report: estimate, deviation against the
/// analytic gamma1, and the verdicts evaluated on the estimated state.
struct SampleReport {
  ProtocolParams params;
  mc::CmEstimate estimate;
  uint64_t seed = 0;
  std::string kernel;
  double max_abs_deviation = 0.0;
  double deviation_over_stderr = 0.0;
  bool reliable = true;
  mc::SimonVerdict simon_step3;  // on the reduced A-B of the propagated estimate
  double nu_estimate = 0.0;
  std::vector<std::string> flags;
};

SampleReport make_sample_report(const ProtocolParams& params, uint64_t n,
                                uint64_t seed, kernels::Kernel kernel,
                                int threads);

nlohmann::json sample_json(const SampleReport& report);
std::string sample_csv(const SampleReport& report);

}  // namespace gdist::io
