#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "satint/wave.hpp"

namespace satint {

struct Interval {
  double t_on = 0.0;
  double t_off = 0.0;
  double duration() const { return t_off - t_on; }
};

/// Maximal runs of samples with |u| >= level. Entry and exit times are
/// located by linear interpolation of u against +-level between the
/// bracketing samples. Runs shorter than `min_duration` are dropped; a
/// negative value means twice the smallest sample spacing.
std::vector<Interval> saturation_intervals(std::span<const double> t, std::span<const double> u,
                                           double level, double min_duration = -1.0);

struct MonotonicityAudit {
  int violations = 0;
  /// Largest single-step increase V_{k+1} - V_k; -inf for a one-sample series.
  double worst_increase = 0.0;
};

MonotonicityAudit monotonicity_audit(std::span<const double> V, double tol_step);

struct SweepSummary {
  double mu = 0.0;
  double z_min = 0.0;
  double u_peak = 0.0;
  double psi_u_peak = 0.0;
  /// First recorded time after which y_l2 + |z| stays below epsilon.
  std::optional<double> settle_time;
  /// y_l2 + |z| at the last sample.
  double final_norm = 0.0;
};

SweepSummary summarize(double mu, const std::vector<wave::DiagnosticsRow>& rows,
                       double epsilon = 0.05);

/// One simulation per mu, run concurrently, returned in the order of `mus`.
std::vector<wave::WaveRun> run_sweep(const wave::WaveConfig& base, std::span<const double> mus);

/// run_sweep + summarize.
std::vector<SweepSummary> sweep(const wave::WaveConfig& base, std::span<const double> mus,
                                double epsilon = 0.05);

void write_sweep_csv(std::ostream& os, std::span<const SweepSummary> rows);
void write_sweep_table(std::ostream& os, std::span<const SweepSummary> rows);

}  // namespace satint
