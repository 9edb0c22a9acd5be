#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "satint/nonlinearity.hpp"

/// Boundary-controlled wave equation on [0, 1] with an integrator at x = 1:
///
///   y_tt = y_xx,  y(0,t) = 0,  y_x(1,t) = psi(u),  z' = y(1,t)
///   u = -y_t(1) - mu z - mu \int_0^1 x y_t dx
///
/// Discretized on the nodes x_i = i dx, i = 0..N, with displacement y and
/// velocity v = y_t co-located.
namespace satint::wave {

enum class Profile { zero, linear_x, eigenmode, custom };

Profile parse_profile(const std::string& name);

struct ProfileSpec {
  Profile kind = Profile::zero;
  std::vector<double> samples;  // custom only, N + 1 node values
};

struct WaveConfig {
  double dx = 0.002;
  double dt = 0.002;
  double t_end = 20.0;
  double mu = 0.3;
  Nonlinearity psi = Nonlinearity::saturation(0.2);
  ProfileSpec y0{Profile::linear_x, {}};
  ProfileSpec v0{Profile::zero, {}};
  double z0 = 0.0;
  int record_stride = 1;
  /// Full displacement snapshots every this many steps; 0 disables.
  int snapshot_stride = 0;

  /// Number of cells N = 1 / dx.
  int cells() const;
  long long steps() const;
  /// Throws std::invalid_argument: CFL dt/dx <= 1, 1/dx integral, positivity.
  void validate() const;
};

struct WaveState {
  Eigen::VectorXd y;
  Eigen::VectorXd v;
  double z = 0.0;
  double t = 0.0;

  int cells() const { return static_cast<int>(y.size()) - 1; }
  double dx() const { return 1.0 / cells(); }
};

/// Samples the initial profiles. Throws std::invalid_argument when a
/// profile is nonzero at x = 0.
WaveState init(const WaveConfig& cfg);

/// Boundary feedback law; the integral uses the trapezoid rule.
double control(const WaveState& s, double mu);

/// One time step of size cfg.dt (velocity-Verlet staging of the leapfrog
/// scheme with a ghost node at x = 1).
WaveState step(const WaveState& s, const WaveConfig& cfg);
void step_in_place(WaveState& s, const WaveConfig& cfg);

/// 1/2 \int v^2 + y_x^2 dx: trapezoid for v^2, cell differences for y_x.
double energy(const WaveState& s);
/// M = -\int_0^1 x v dx (trapezoid).
double m_functional(const WaveState& s);
/// V = E + mu/2 (z - M)^2
double lyapunov(const WaveState& s, double mu);
/// Trapezoid L2 norm of node values on [0, 1].
double l2_norm(const Eigen::VectorXd& f);

/// y = sin(pi x / 2) cos(pi t / 2) and its time derivative: an undamped
/// mode of the open loop (psi == 0).
std::pair<double, double> analytic_mode(double x, double t);

struct DiagnosticsRow {
  double t = 0.0;
  double u = 0.0;
  double psi_u = 0.0;
  double E = 0.0;
  double Mfun = 0.0;
  double V = 0.0;
  double z = 0.0;
  double y_l2 = 0.0;
  double v_l2 = 0.0;
};

DiagnosticsRow diagnose(const WaveState& s, const WaveConfig& cfg);

struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd y;
};

struct WaveRun {
  std::vector<DiagnosticsRow> rows;
  std::vector<Snapshot> snapshots;
  /// sum_n dt |(M_{n+1} - M_n)/dt - (z_{n+1} - z_n)/dt + psi(u_n)|, the
  /// discrete defect of M' = z' - psi(u).
  double forwarding_residual = 0.0;
  WaveState final_state;
};

/// init + step to t_end, recording every cfg.record_stride steps plus the
/// final step. Throws NumericalError on blow-up.
WaveRun simulate(const WaveConfig& cfg);

/// CSV with header `t,u,psi_u,E,M,V,z,y_l2,v_l2`.
void write_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
/// Node values as `x,y` rows.
void write_snapshot(std::ostream& os, const Snapshot& snap);

}  // namespace satint::wave
