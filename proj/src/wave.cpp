#include "satint/wave.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "satint/errors.hpp"

namespace satint::wave {

Profile parse_profile(const std::string& name) {
  if (name == "zero") return Profile::zero;
  if (name == "linear_x") return Profile::linear_x;
  if (name == "eigenmode") return Profile::eigenmode;
  if (name == "custom") return Profile::custom;
  throw std::invalid_argument(fmt::format(
      "unknown profile '{}' (expected zero, linear_x, eigenmode or custom)", name));
}

int WaveConfig::cells() const { return static_cast<int>(std::lround(1.0 / dx)); }

long long WaveConfig::steps() const { return std::llround(t_end / dt); }

void WaveConfig::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0) || !(t_end > 0.0)) {
    throw std::invalid_argument("dx, dt and t_end must be positive");
  }
  if (!(mu > 0.0)) throw std::invalid_argument(fmt::format("mu must be positive, got {}", mu));
  if (dt / dx > 1.0 + 1e-12) {
    throw std::invalid_argument(
        fmt::format("CFL violated: dt/dx = {} > 1 for the explicit scheme", dt / dx));
  }
  const double n = 1.0 / dx;
  if (n < 2.0 || std::abs(n - std::round(n)) > 1e-9 * n) {
    throw std::invalid_argument(fmt::format("1/dx must be an integer >= 2, got {}", n));
  }
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (snapshot_stride < 0) throw std::invalid_argument("snapshot_stride must be >= 0");
  if (steps() < 1) throw std::invalid_argument("t_end shorter than one step");
}

namespace {

double trapezoid(const Eigen::VectorXd& f, double dx) {
  const auto n = f.size();
  return dx * (f.sum() - 0.5 * (f(0) + f(n - 1)));
}

Eigen::VectorXd nodes(int cells) { return Eigen::VectorXd::LinSpaced(cells + 1, 0.0, 1.0); }

Eigen::VectorXd sample(const ProfileSpec& p, int cells, const char* which) {
  const Eigen::VectorXd x = nodes(cells);
  Eigen::VectorXd f;
  switch (p.kind) {
    case Profile::zero:
      f = Eigen::VectorXd::Zero(cells + 1);
      break;
    case Profile::linear_x:
      f = x;
      break;
    case Profile::eigenmode:
      f = (0.5 * std::numbers::pi * x).array().sin();
      break;
    case Profile::custom:
      if (static_cast<int>(p.samples.size()) != cells + 1) {
        throw std::invalid_argument(fmt::format("custom {} profile has {} samples, grid has {} nodes",
                                                which, p.samples.size(), cells + 1));
      }
      f = Eigen::Map<const Eigen::VectorXd>(p.samples.data(), cells + 1);
      break;
  }
  if (f(0) != 0.0) {
    throw std::invalid_argument(
        fmt::format("{} profile is {} at x = 0; the left end is clamped", which, f(0)));
  }
  if (!f.allFinite()) throw std::invalid_argument(fmt::format("{} profile is not finite", which));
  return f;
}

// Advances v by h * y_xx. At x = 1 the ghost node y_{N+1} = y_{N-1} + 2 dx psi(u)
// closes the stencil, and u is taken implicitly in v_N:
//
//   w = base + (2h/dx) psi(-c w - r)
//
// with c w + r = v_N + mu z + mu trapz(x v). The map w -> w - base - k psi(.)
// is strictly increasing, so the root is unique and bracketed by base and
// base + k psi(-c base - r).
void half_kick(Eigen::VectorXd& v, const Eigen::VectorXd& y, double z, double h,
               const WaveConfig& cfg) {
  const auto N = y.size() - 1;
  const double dx = 1.0 / static_cast<double>(N);
  const double inv_dx2 = 1.0 / (dx * dx);

  double moment = 0.0;  // \sum_{0<i<N} x_i v_i
  for (Eigen::Index i = 1; i < N; ++i) {
    v(i) += h * (y(i + 1) - 2.0 * y(i) + y(i - 1)) * inv_dx2;
    moment += static_cast<double>(i) * dx * v(i);
  }
  v(0) = 0.0;

  const double base = v(N) + h * 2.0 * (y(N - 1) - y(N)) * inv_dx2;
  const double k = 2.0 * h / dx;
  const double c = 1.0 + 0.5 * cfg.mu * dx;
  const double r = cfg.mu * z + cfg.mu * dx * moment;

  const auto& psi = cfg.psi;
  const double push = k * psi(-c * base - r);
  if (push == 0.0) {
    v(N) = base;
    return;
  }
  auto g = [&](double w) { return w - base - k * psi(-c * w - r); };
  double lo = std::min(base, base + push);
  double hi = std::max(base, base + push);
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) {
    v(N) = lo;
    return;
  }
  if (ghi == 0.0) {
    v(N) = hi;
    return;
  }
  // Exact arithmetic gives opposite signs; rounding can flip the endpoint at
  // the saturated end, and then that endpoint is the root to working precision.
  if ((glo < 0.0) == (ghi < 0.0)) {
    v(N) = std::abs(glo) < std::abs(ghi) ? lo : hi;
    return;
  }
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(), max_iter);
  v(N) = 0.5 * (a + b);
}

}  // namespace

WaveState init(const WaveConfig& cfg) {
  cfg.validate();
  const int n = cfg.cells();
  WaveState s;
  s.y = sample(cfg.y0, n, "y0");
  s.v = sample(cfg.v0, n, "v0");
  s.z = cfg.z0;
  s.t = 0.0;
  return s;
}

double control(const WaveState& s, double mu) {
  const Eigen::VectorXd x = nodes(s.cells());
  const double moment = trapezoid(x.cwiseProduct(s.v), s.dx());
  return -s.v(s.v.size() - 1) - mu * s.z - mu * moment;
}

void step_in_place(WaveState& s, const WaveConfig& cfg) {
  const auto N = s.y.size() - 1;
  if (cfg.dt / s.dx() > 1.0 + 1e-12) {
    throw std::invalid_argument(fmt::format("CFL violated: dt/dx = {}", cfg.dt / s.dx()));
  }
  const double h = 0.5 * cfg.dt;
  half_kick(s.v, s.y, s.z, h, cfg);
  const double y_end = s.y(N);
  s.y += cfg.dt * s.v;
  s.y(0) = 0.0;
  s.z += cfg.dt * y_end;
  half_kick(s.v, s.y, s.z, h, cfg);
  s.t += cfg.dt;
  if (!s.y.allFinite() || !s.v.allFinite() || !std::isfinite(s.z)) {
    throw NumericalError(fmt::format("non-finite wave state at t = {}", s.t));
  }
}

WaveState step(const WaveState& s, const WaveConfig& cfg) {
  WaveState next = s;
  step_in_place(next, cfg);
  return next;
}

double energy(const WaveState& s) {
  const double dx = s.dx();
  const double kinetic = trapezoid(s.v.cwiseAbs2(), dx);
  const auto N = s.y.size() - 1;
  const double strain = (s.y.tail(N) - s.y.head(N)).squaredNorm() / dx;
  return 0.5 * (kinetic + strain);
}

double m_functional(const WaveState& s) {
  const Eigen::VectorXd x = nodes(s.cells());
  return -trapezoid(x.cwiseProduct(s.v), s.dx());
}

double lyapunov(const WaveState& s, double mu) {
  const double gap = s.z - m_functional(s);
  return energy(s) + 0.5 * mu * gap * gap;
}

double l2_norm(const Eigen::VectorXd& f) {
  const double dx = 1.0 / static_cast<double>(f.size() - 1);
  return std::sqrt(trapezoid(f.cwiseAbs2(), dx));
}

std::pair<double, double> analytic_mode(double x, double t) {
  constexpr double w = 0.5 * std::numbers::pi;
  return {std::sin(w * x) * std::cos(w * t), -w * std::sin(w * x) * std::sin(w * t)};
}

DiagnosticsRow diagnose(const WaveState& s, const WaveConfig& cfg) {
  DiagnosticsRow row;
  row.t = s.t;
  row.u = control(s, cfg.mu);
  row.psi_u = cfg.psi(row.u);
  row.E = energy(s);
  row.Mfun = m_functional(s);
  row.z = s.z;
  const double gap = row.z - row.Mfun;
  row.V = row.E + 0.5 * cfg.mu * gap * gap;
  row.y_l2 = l2_norm(s.y);
  row.v_l2 = l2_norm(s.v);
  return row;
}

WaveRun simulate(const WaveConfig& cfg) {
  WaveRun run;
  WaveState s = init(cfg);
  const long long steps = cfg.steps();

  DiagnosticsRow row = diagnose(s, cfg);
  run.rows.push_back(row);
  if (cfg.snapshot_stride > 0) run.snapshots.push_back({s.t, s.y});
  const double blowup = 1e6 * std::max(row.E, row.V);

  for (long long k = 1; k <= steps; ++k) {
    const double m_prev = row.Mfun;
    const double z_prev = s.z;
    const double psi_prev = row.psi_u;

    step_in_place(s, cfg);
    s.t = static_cast<double>(k) * cfg.dt;
    row = diagnose(s, cfg);

    run.forwarding_residual +=
        std::abs((row.Mfun - m_prev) - (s.z - z_prev) + cfg.dt * psi_prev);
    if (row.E > blowup && blowup > 0.0) {
      throw NumericalError(fmt::format("blow-up at t = {}: E = {} exceeds 1e6 x initial level",
                                       s.t, row.E));
    }
    if (k % cfg.record_stride == 0 || k == steps) run.rows.push_back(row);
    if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) {
      run.snapshots.push_back({s.t, s.y});
    }
  }
  run.final_state = std::move(s);
  return run;
}

void write_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << "t,u,psi_u,E,M,V,z,y_l2,v_l2\n";
  for (const auto& r : rows) {
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
               r.t, r.u + 0.0, r.psi_u + 0.0, r.E, r.Mfun + 0.0, r.V, r.z + 0.0, r.y_l2, r.v_l2);
  }
}

void write_snapshot(std::ostream& os, const Snapshot& snap) {
  const auto n = snap.y.size();
  os << "x,y\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    fmt::print(os, "{:.17g},{:.17g}\n", static_cast<double>(i) / static_cast<double>(n - 1),
               snap.y(i));
  }
}

}  // namespace satint::wave
