#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "satint/abstract_core.hpp"

namespace satint {

enum class Scheme { rk4, implicit_midpoint };

Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  int record_stride = 1;

  /// Fixed-point tolerance and iteration cap of the implicit stage.
  double implicit_tol = 1e-12;
  int implicit_max_iter = 100;

  void validate() const;
};

/// Recorded samples of a closed-loop run, one entry per recorded step.
struct Trajectory {
  std::vector<double> times;
  std::vector<ExtendedState> states;
  std::vector<double> u;
  std::vector<double> psi_u;
  std::vector<double> V;

  std::size_t size() const { return times.size(); }
  const ExtendedState& final_state() const { return states.back(); }
};

/// Integrates the saturated closed loop from xi0 to cfg.t_end. The initial
/// and final states are always recorded.
Trajectory integrate(const AbstractSystem& sys, const ForwardingDesign& design,
                     const Nonlinearity& psi, const ExtendedState& xi0,
                     const IntegratorConfig& cfg);

/// CSV with header `t,x1..xn,z,u,psi_u,V`.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace satint
