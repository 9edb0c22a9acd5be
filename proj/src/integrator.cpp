#include "satint/integrator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "satint/errors.hpp"

namespace satint {

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "implicit_midpoint") return Scheme::implicit_midpoint;
  throw std::invalid_argument(
      fmt::format("unknown scheme '{}' (expected rk4 or implicit_midpoint)", name));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be > 0");
  if (dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
}

namespace {

using Vec = Eigen::VectorXd;

struct Field {
  const AbstractSystem& sys;
  const ForwardingDesign& design;
  const Nonlinearity& psi;

  Vec operator()(const Vec& xi) const {
    return closed_loop_field(sys, design, psi, ExtendedState::from_vector(xi)).to_vector();
  }
};

Vec rk4_step(const Field& f, const Vec& xi, double h) {
  const Vec k1 = f(xi);
  const Vec k2 = f(xi + 0.5 * h * k1);
  const Vec k3 = f(xi + 0.5 * h * k2);
  const Vec k4 = f(xi + h * k3);
  return xi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// xi+ = xi + h F((xi + xi+) / 2), solved by Picard iteration; psi is only
// Lipschitz so Newton is not an option.
Vec midpoint_step(const Field& f, const Vec& xi, double h, const IntegratorConfig& cfg,
                  double t) {
  Vec next = xi + h * f(xi);
  for (int it = 0; it < cfg.implicit_max_iter; ++it) {
    const Vec candidate = xi + h * f(0.5 * (xi + next));
    const double change = (candidate - next).lpNorm<Eigen::Infinity>();
    next = candidate;
    if (change <= cfg.implicit_tol * (1.0 + next.lpNorm<Eigen::Infinity>())) return next;
  }
  throw NumericalError(fmt::format(
      "implicit midpoint stage did not converge within {} iterations at t = {}; reduce dt",
      cfg.implicit_max_iter, t));
}

}  // namespace

Trajectory integrate(const AbstractSystem& sys, const ForwardingDesign& design,
                     const Nonlinearity& psi, const ExtendedState& xi0,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (xi0.x.size() != sys.dim()) throw std::invalid_argument("initial state has wrong dimension");
  if (!xi0.x.allFinite() || !std::isfinite(xi0.z)) {
    throw std::invalid_argument("initial state must be finite");
  }
  if (!design.admissible) {
    throw AssumptionError(fmt::format(
        "inadmissible design: C A^-1 B = {} is zero, refusing to integrate", design.mB));
  }

  const Field f{sys, design, psi};
  const auto steps = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));

  Trajectory traj;
  auto record = [&](double t, const Vec& xi) {
    const ExtendedState s = ExtendedState::from_vector(xi);
    const double u = control(sys, design, s);
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.u.push_back(u);
    traj.psi_u.push_back(psi(u));
    traj.V.push_back(v_inner(sys, design, s, s));
  };

  Vec xi = xi0.to_vector();
  record(0.0, xi);
  for (long long k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    xi = cfg.scheme == Scheme::rk4 ? rk4_step(f, xi, cfg.dt) : midpoint_step(f, xi, cfg.dt, cfg, t);
    if (!xi.allFinite()) {
      throw NumericalError(fmt::format("non-finite state at t = {}", t));
    }
    if (k % cfg.record_stride == 0 || k == steps) record(t, xi);
  }
  return traj;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const auto n = traj.states.empty() ? 0 : traj.states.front().x.size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  os << ",z,u,psi_u,V\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    fmt::print(os, "{:.17g}", traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) fmt::print(os, ",{:.17g}", traj.states[k].x(i) + 0.0);
    // + 0.0 prints signed zeros from the control law as plain 0
    fmt::print(os, ",{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.states[k].z + 0.0, traj.u[k] + 0.0,
               traj.psi_u[k] + 0.0, traj.V[k]);
  }
}

}  // namespace satint
