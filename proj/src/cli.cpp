#include "satint/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "satint/abstract_core.hpp"
#include "satint/config.hpp"
#include "satint/diagnostics.hpp"
#include "satint/errors.hpp"
#include "satint/integrator.hpp"
#include "satint/svg.hpp"
#include "satint/wave.hpp"

namespace fs = std::filesystem;

namespace satint::cli {

Command parse_command(const std::string& name) {
  if (name == "wave_run") return Command::wave_run;
  if (name == "wave_sweep") return Command::wave_sweep;
  if (name == "abstract_check") return Command::abstract_check;
  if (name == "abstract_run") return Command::abstract_run;
  throw std::invalid_argument(fmt::format("unknown command '{}'", name));
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError(fmt::format("cannot write {}", path.string()));
  return os;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("output directory {} is not writable", dir.string()));
  }
}

template <typename F>
std::vector<double> column(const std::vector<wave::DiagnosticsRow>& rows, F f) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(f(r));
  return out;
}

std::optional<double> saturation_level(const Nonlinearity& psi) {
  if (psi.kind() == Nonlinearity::Kind::saturation) return psi.level();
  return std::nullopt;
}

int wave_run(const RunManifest& m, std::ostream& out) {
  const auto kv = KeyValueConfig::load(m.config_path);
  const wave::WaveConfig cfg = wave_config_from(kv);
  const double eps = kv.get_double("settle_eps", 0.05);
  prepare_output(m.output_dir);

  const wave::WaveRun run = wave::simulate(cfg);
  const auto& rows = run.rows;
  {
    auto os = open_out(m.output_dir / "diagnostics.csv");
    wave::write_csv(os, rows);
  }
  if (!run.snapshots.empty()) {
    prepare_output(m.output_dir / "snapshots");
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
      auto os = open_out(m.output_dir / "snapshots" / fmt::format("y_{:04d}.csv", k));
      wave::write_snapshot(os, run.snapshots[k]);
    }
  }

  const auto t = column(rows, [](const auto& r) { return r.t; });
  const auto u = column(rows, [](const auto& r) { return r.u; });
  const auto V = column(rows, [](const auto& r) { return r.V; });
  const SweepSummary summary = summarize(cfg.mu, rows, eps);
  const double tol_step = 1e-6 * (1.0 + rows.front().V);
  const MonotonicityAudit audit = monotonicity_audit(V, tol_step);

  std::ostringstream kvout;
  fmt::print(out, "wave_run: {} steps, dx = {}, dt = {}, mu = {}, psi = {}\n", cfg.steps(), cfg.dx,
             cfg.dt, cfg.mu, cfg.psi.name());
  fmt::print(out, "final t = {:.4f}: |y|_L2 = {:.4e}, z = {:.4e}, V = {:.4e}\n", rows.back().t,
             rows.back().y_l2, rows.back().z, rows.back().V);
  fmt::print(out, "z_min = {:.5f}, max|u| = {:.5f}, max|psi(u)| = {:.5f}, settle ({}): {}\n",
             summary.z_min, summary.u_peak, summary.psi_u_peak, eps,
             summary.settle_time ? fmt::format("{:.3f} s", *summary.settle_time) : "not settled");
  fmt::print(kvout, "final_y_l2={:.17g}\nfinal_z={:.17g}\nfinal_V={:.17g}\nz_min={:.17g}\n",
             rows.back().y_l2, rows.back().z, rows.back().V, summary.z_min);

  if (const auto level = saturation_level(cfg.psi)) {
    const auto intervals = saturation_intervals(t, u, *level);
    fmt::print(out, "saturation |u| >= {}: {} interval(s)\n", *level, intervals.size());
    for (const auto& iv : intervals) {
      fmt::print(out, "  [{:.3f}, {:.3f}] s\n", iv.t_on, iv.t_off);
    }
    fmt::print(kvout, "saturation_intervals={}\n", intervals.size());
  }
  fmt::print(out, "Lyapunov audit (tol {:.3g} per recorded step): {} violation(s), worst increase {:.3g} -> {}\n",
             tol_step, audit.violations, audit.worst_increase,
             audit.violations == 0 ? "PASS" : "FAIL");
  fmt::print(out, "forwarding balance residual: {:.4e}\n", run.forwarding_residual);
  fmt::print(kvout, "lyapunov_violations={}\nforwarding_residual={:.17g}\n", audit.violations,
             run.forwarding_residual);

  if (cfg.psi.kind() == Nonlinearity::Kind::off) {
    const double e0 = rows.front().E;
    double drift = 0.0;
    for (const auto& r : rows) drift = std::max(drift, std::abs(r.E - e0));
    const double rel = e0 > 0.0 ? drift / e0 : drift;
    fmt::print(out, "open-loop energy conservation: max |E - E0| / E0 = {:.3e} -> {}\n", rel,
               rel <= 1e-3 ? "PASS" : "FAIL");
    fmt::print(kvout, "energy_drift={:.17g}\n", rel);
  }
  write_text(m.output_dir / "summary.txt", kvout.str());

  if (m.emit_plots) {
    const auto yl2 = column(rows, [](const auto& r) { return r.y_l2; });
    const auto z = column(rows, [](const auto& r) { return r.z; });
    const auto psi_u = column(rows, [](const auto& r) { return r.psi_u; });
    const auto E = column(rows, [](const auto& r) { return r.E; });
    write_text(m.output_dir / "y_l2.svg",
               svg::render({"L2 norm of y", "t [s]", "|y|", {{"|y(.,t)|", t, yl2, svg::color(1)}}}));
    write_text(m.output_dir / "z.svg",
               svg::render({"integrator state", "t [s]", "z", {{"z(t)", t, z, svg::color(1)}}}));
    write_text(m.output_dir / "u_psi.svg",
               svg::render({"control", "t [s]", "",
                            {{"u(t)", t, u, svg::color(0)}, {"psi(u(t))", t, psi_u, svg::color(1)}}}));
    write_text(m.output_dir / "lyapunov.svg",
               svg::render({"energy and Lyapunov functional", "t [s]", "",
                            {{"E", t, E, svg::color(2)}, {"V", t, V, svg::color(3)}}}));
  }
  return success;
}

int wave_sweep(const RunManifest& m, std::ostream& out) {
  const auto kv = KeyValueConfig::load(m.config_path);
  if (!kv.has("mus")) throw ConfigError(fmt::format("{}: missing key 'mus'", kv.source()));
  const std::vector<double> mus = kv.get_list("mus");
  if (mus.empty()) throw ConfigError(fmt::format("{}: 'mus' is empty", kv.source()));
  for (double mu : mus) {
    if (!(mu > 0.0)) throw ConfigError(fmt::format("{}: mu values must be > 0", kv.source()));
  }
  const wave::WaveConfig base = wave_config_from(kv);
  const double eps = kv.get_double("settle_eps", 0.05);
  prepare_output(m.output_dir);

  const auto runs = run_sweep(base, mus);
  std::vector<SweepSummary> table;
  for (std::size_t k = 0; k < runs.size(); ++k) table.push_back(summarize(mus[k], runs[k].rows, eps));

  {
    auto os = open_out(m.output_dir / "sweep.csv");
    write_sweep_csv(os, table);
  }
  write_sweep_table(out, table);

  if (m.emit_plots) {
    auto plot = [&](const std::string& file, const std::string& title, auto field) {
      svg::LinePlot p{title, "t [s]", "", {}};
      for (std::size_t k = 0; k < runs.size(); ++k) {
        p.series.push_back({fmt::format("mu = {}", mus[k]),
                            column(runs[k].rows, [](const auto& r) { return r.t; }),
                            column(runs[k].rows, field), svg::color(k)});
      }
      write_text(m.output_dir / file, svg::render(p));
    };
    plot("sweep_z.svg", "z(t)", [](const auto& r) { return r.z; });
    plot("sweep_y_l2.svg", "|y(.,t)|", [](const auto& r) { return r.y_l2; });
    plot("sweep_u.svg", "u(t)", [](const auto& r) { return r.u; });
    plot("sweep_psi_u.svg", "psi(u(t))", [](const auto& r) { return r.psi_u; });
  }
  return success;
}

void print_design(std::ostream& out, const AbstractSystem& sys, const ForwardingDesign& d) {
  const NormEquivalence ne = norm_equivalence(sys, d);
  fmt::print(out, "forwarding design (mu = {}):\n", d.mu);
  fmt::print(out, "  M      = [{}]\n", fmt::join(d.M.data(), d.M.data() + d.M.size(), ", "));
  fmt::print(out, "  K      = [{}]\n", fmt::join(d.K.data(), d.K.data() + d.K.size(), ", "));
  fmt::print(out, "  M B    = {}\n", d.mB);
  fmt::print(out, "  |MA-C| = {:.3e}\n", (d.M * sys.A - sys.C).lpNorm<Eigen::Infinity>());
  fmt::print(out, "  V-norm equivalence: v_lo = {:.6g}, v_hi = {:.6g}, k = {:.6g}{}\n", ne.v_lo,
             ne.v_hi, ne.stability_constant(), ne.weakly_coercive ? " (weakly coercive)" : "");
}

int abstract_check(const RunManifest& m, std::ostream& out) {
  const auto kv = KeyValueConfig::load(m.config_path);
  const AbstractRunConfig cfg = abstract_config_from(kv);
  prepare_output(m.output_dir);

  const AssumptionReport report = validate_assumptions(cfg.sys);
  out << report.to_table();
  write_text(m.output_dir / "assumptions.txt", report.to_key_value());

  if (cfg.mu && report.invertible) {
    const ForwardingDesign d = design(cfg.sys, *cfg.mu);
    if (d.admissible) {
      print_design(out, cfg.sys, d);
      const ProbeResult probe = dissipativity_probe(cfg.sys, d, cfg.psi, cfg.probe_samples, m.seed);
      fmt::print(out, "  dissipativity probe ({} pairs, psi = {}, seed {}): worst <dF, dxi>_V = {:.3e}\n",
                 probe.samples, cfg.psi.name(), m.seed, probe.worst_inner);
    }
  }
  if (!report.all_green()) {
    out << "assumptions violated\n";
    return assumption_violation;
  }
  out << "all assumptions hold\n";
  return success;
}

int abstract_run(const RunManifest& m, std::ostream& out) {
  const auto kv = KeyValueConfig::load(m.config_path);
  const AbstractRunConfig cfg = abstract_config_from(kv);
  if (!cfg.mu) throw ConfigError(fmt::format("{}: missing key 'mu'", kv.source()));
  if (!cfg.xi0) throw ConfigError(fmt::format("{}: missing key 'x0'", kv.source()));
  prepare_output(m.output_dir);

  const AssumptionReport report = validate_assumptions(cfg.sys);
  out << report.to_table();
  if (!report.invertible) {
    throw AssumptionError("A is not invertible; the forwarding operator M = C A^-1 does not exist");
  }
  const ForwardingDesign d = design(cfg.sys, *cfg.mu);
  if (!d.admissible) {
    throw AssumptionError(fmt::format(
        "refusing to run: steady-state gain C A^-1 B = {:.3g} vanishes, so the integrator "
        "cannot be stabilized",
        d.mB));
  }
  if (!report.all_green()) {
    out << "warning: not all assumptions hold; convergence is not guaranteed\n";
  }
  print_design(out, cfg.sys, d);

  const Trajectory traj = integrate(cfg.sys, d, cfg.psi, *cfg.xi0, cfg.integ);
  {
    auto os = open_out(m.output_dir / "trajectory.csv");
    write_csv(os, traj);
  }

  const double v0 = traj.V.front();
  const double tol_step =
      (cfg.integ.scheme == Scheme::implicit_midpoint ? 1e-8 : 1e-6) * (1.0 + v0);
  const MonotonicityAudit audit = monotonicity_audit(traj.V, tol_step);
  const double n0 = cfg.xi0->to_vector().norm();
  double sup = 0.0;
  for (const auto& s : traj.states) sup = std::max(sup, s.to_vector().norm());
  const double k = norm_equivalence(cfg.sys, d).stability_constant();

  fmt::print(out, "integrated to t = {} with {} ({} samples)\n", traj.times.back(),
             cfg.integ.scheme == Scheme::rk4 ? "rk4" : "implicit_midpoint", traj.size());
  fmt::print(out, "|xi(0)| = {:.4e}, |xi(t_end)| = {:.4e}, sup |xi| = {:.4e} (bound k|xi0| = {:.4e})\n",
             n0, traj.final_state().to_vector().norm(), sup, k * n0);
  fmt::print(out, "Lyapunov audit (tol {:.3g} per recorded step): {} violation(s) -> {}\n", tol_step,
             audit.violations, audit.violations == 0 ? "PASS" : "FAIL");

  if (m.emit_plots) {
    svg::LinePlot states{"closed-loop state", "t [s]", "", {}};
    const auto n = cfg.sys.dim();
    for (Eigen::Index i = 0; i <= n; ++i) {
      std::vector<double> ys;
      ys.reserve(traj.size());
      for (const auto& s : traj.states) ys.push_back(i < n ? s.x(i) : s.z);
      states.series.push_back({i < n ? fmt::format("x{}", i + 1) : "z", traj.times, ys,
                               svg::color(static_cast<std::size_t>(i))});
    }
    write_text(m.output_dir / "states.svg", svg::render(states));
    write_text(m.output_dir / "lyapunov.svg",
               svg::render({"V(t)", "t [s]", "V", {{"V", traj.times, traj.V, svg::color(3)}}}));
    write_text(m.output_dir / "u_psi.svg",
               svg::render({"control", "t [s]", "",
                            {{"u", traj.times, traj.u, svg::color(0)},
                             {"psi(u)", traj.times, traj.psi_u, svg::color(1)}}}));
  }
  return success;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    switch (manifest.command) {
      case Command::wave_run: return wave_run(manifest, out);
      case Command::wave_sweep: return wave_sweep(manifest, out);
      case Command::abstract_check: return abstract_check(manifest, out);
      case Command::abstract_run: return abstract_run(manifest, out);
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return config_error;
  } catch (const AssumptionError& e) {
    fmt::print(err, "assumption violated: {}\n", e.what());
    return assumption_violation;
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return numerical_failure;
  } catch (const std::domain_error& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return numerical_failure;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return config_error;
  }
  return config_error;
}

}  // namespace satint::cli
