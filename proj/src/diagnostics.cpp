#include "satint/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace satint {

namespace {

// Time at which the segment (t0,u0)-(t1,u1) crosses the level of u's sign
// on the saturated side.
double crossing(double t0, double u0, double t1, double u1, double target) {
  if (u1 == u0) return t1;
  const double frac = std::clamp((target - u0) / (u1 - u0), 0.0, 1.0);
  return t0 + frac * (t1 - t0);
}

}  // namespace

std::vector<Interval> saturation_intervals(std::span<const double> t, std::span<const double> u,
                                           double level, double min_duration) {
  if (t.empty() || t.size() != u.size()) {
    throw std::invalid_argument("saturation_intervals: empty or mismatched series");
  }
  if (min_duration < 0.0) {
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < t.size(); ++k) spacing = std::min(spacing, t[k] - t[k - 1]);
    min_duration = std::isfinite(spacing) ? 2.0 * spacing : 0.0;
  }

  std::vector<Interval> out;
  const auto sat = [&](std::size_t k) { return std::abs(u[k]) >= level; };
  std::size_t k = 0;
  while (k < t.size()) {
    if (!sat(k)) {
      ++k;
      continue;
    }
    Interval iv;
    iv.t_on = k == 0 ? t[0]
                     : crossing(t[k - 1], u[k - 1], t[k], u[k], std::copysign(level, u[k]));
    std::size_t last = k;
    while (last + 1 < t.size() && sat(last + 1)) ++last;
    iv.t_off = last + 1 == t.size()
                   ? t[last]
                   : crossing(t[last], u[last], t[last + 1], u[last + 1],
                              std::copysign(level, u[last]));
    // Relative slack so that a run of exactly min_duration survives rounding.
    if (iv.duration() >= min_duration * (1.0 - 1e-9)) out.push_back(iv);
    k = last + 1;
  }
  return out;
}

MonotonicityAudit monotonicity_audit(std::span<const double> V, double tol_step) {
  if (V.empty()) throw std::invalid_argument("monotonicity_audit: empty series");
  MonotonicityAudit a;
  a.worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < V.size(); ++k) {
    const double inc = V[k] - V[k - 1];
    a.worst_increase = std::max(a.worst_increase, inc);
    if (inc > tol_step) ++a.violations;
  }
  return a;
}

SweepSummary summarize(double mu, const std::vector<wave::DiagnosticsRow>& rows, double epsilon) {
  if (rows.empty()) throw std::invalid_argument("summarize: no diagnostics rows");
  SweepSummary s;
  s.mu = mu;
  s.z_min = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    s.z_min = std::min(s.z_min, r.z);
    s.u_peak = std::max(s.u_peak, std::abs(r.u));
    s.psi_u_peak = std::max(s.psi_u_peak, std::abs(r.psi_u));
  }
  const auto norm = [](const wave::DiagnosticsRow& r) { return r.y_l2 + std::abs(r.z); };
  s.final_norm = norm(rows.back());

  // Walk back from the end while the combined norm stays below epsilon.
  std::size_t k = rows.size();
  while (k > 0 && norm(rows[k - 1]) < epsilon) --k;
  if (k < rows.size()) s.settle_time = rows[k].t;
  return s;
}

std::vector<wave::WaveRun> run_sweep(const wave::WaveConfig& base, std::span<const double> mus) {
  for (double mu : mus) {
    if (!(mu > 0.0)) throw std::invalid_argument(fmt::format("sweep: mu must be > 0, got {}", mu));
  }
  std::vector<std::future<wave::WaveRun>> jobs;
  jobs.reserve(mus.size());
  for (double mu : mus) {
    wave::WaveConfig cfg = base;
    cfg.mu = mu;
    cfg.snapshot_stride = 0;
    jobs.push_back(std::async(std::launch::async, [cfg] { return wave::simulate(cfg); }));
  }
  std::vector<wave::WaveRun> runs;
  runs.reserve(jobs.size());
  for (auto& j : jobs) runs.push_back(j.get());
  return runs;
}

std::vector<SweepSummary> sweep(const wave::WaveConfig& base, std::span<const double> mus,
                                double epsilon) {
  const auto runs = run_sweep(base, mus);
  std::vector<SweepSummary> out;
  out.reserve(runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) out.push_back(summarize(mus[k], runs[k].rows, epsilon));
  return out;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepSummary> rows) {
  os << "mu,z_min,u_peak,psi_u_peak,settle_time,final_norm\n";
  for (const auto& r : rows) {
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", r.mu, r.z_min, r.u_peak,
               r.psi_u_peak, r.settle_time ? fmt::format("{:.17g}", *r.settle_time) : "nan",
               r.final_norm);
  }
}

void write_sweep_table(std::ostream& os, std::span<const SweepSummary> rows) {
  fmt::print(os, "{:>8} {:>12} {:>10} {:>12} {:>12} {:>12}\n", "mu", "z_min", "u_peak",
             "psi_u_peak", "settle [s]", "final_norm");
  for (const auto& r : rows) {
    fmt::print(os, "{:>8.3f} {:>12.5f} {:>10.5f} {:>12.5f} {:>12} {:>12.3e}\n", r.mu, r.z_min,
               r.u_peak, r.psi_u_peak,
               r.settle_time ? fmt::format("{:.3f}", *r.settle_time) : "not settled",
               r.final_norm);
  }
}

}  // namespace satint
