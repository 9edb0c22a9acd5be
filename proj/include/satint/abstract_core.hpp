#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "satint/nonlinearity.hpp"

namespace satint {

/// Conservative linear plant with integral action on its scalar output:
///
///   x' = A x + B psi(u),   z' = C x
///
/// P is the energy weight certifying A^T P + P A <= 0.
struct AbstractSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  Eigen::MatrixXd P;

  /// Checks dimensions and finiteness only. Structural properties are the
  /// job of validate_assumptions, so that failing systems can be audited.
  AbstractSystem(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C,
                 Eigen::MatrixXd P);

  Eigen::Index dim() const { return A.rows(); }
};

/// Plant state x together with the integrator state z.
struct ExtendedState {
  Eigen::VectorXd x;
  double z = 0.0;

  static ExtendedState zero(Eigen::Index n) { return {Eigen::VectorXd::Zero(n), 0.0}; }
  static ExtendedState from_vector(const Eigen::VectorXd& xi);
  Eigen::VectorXd to_vector() const;
};

struct AuditTolerances {
  /// lambda_max(A^T P + P A) <= dissipativity * ||P||_2
  double dissipativity = 1e-9;
  /// sigma_min(A) > invertibility * sigma_max(A)
  double invertibility = 1e-12;
  /// Kalman rank counts singular values above rank * sigma_max
  double rank = 1e-8;
  /// ||P - P^T|| <= symmetry * ||P||
  double symmetry = 1e-12;
  /// |C A^-1 B| > steady_state_gain * ||C A^-1|| * ||B||
  double steady_state_gain = 1e-10;
};

struct AssumptionReport {
  bool dissipative = false;
  double dissipation_eigenvalue = 0.0;  // lambda_max(A^T P + P A)

  bool invertible = false;
  double min_singular_value = 0.0;

  bool coercive = false;
  bool symmetric = false;
  double min_eigenvalue_p = 0.0;

  /// Compact injection of the operator domain; vacuous in finite dimension.
  std::string compact_injection = "automatic (finite dimension)";

  bool observable = false;
  Eigen::Index observability_rank = 0;
  Eigen::Index dimension = 0;

  bool steady_state_gain_nonzero = false;
  double steady_state_gain = 0.0;  // C A^-1 B, NaN when A is singular

  bool all_green() const {
    return dissipative && invertible && coercive && observable && steady_state_gain_nonzero;
  }

  /// Aligned human-readable table.
  std::string to_table() const;
  /// One `key=value` per line.
  std::string to_key_value() const;
};

AssumptionReport validate_assumptions(const AbstractSystem& sys,
                                      const AuditTolerances& tol = {});

/// Row vector M with M A = C, i.e. M = C A^-1, computed by a linear solve
/// against A^T. Throws AssumptionError if A is singular.
Eigen::RowVectorXd forwarding_operator(const AbstractSystem& sys,
                                       const AuditTolerances& tol = {});

struct ForwardingDesign {
  Eigen::RowVectorXd M;
  double mu = 0.0;
  /// u = K [x; z] with K = [ -B^T P - mu (B^T M^T) M ,  mu B^T M^T ]
  Eigen::RowVectorXd K;
  /// M B = C A^-1 B
  double mB = 0.0;
  bool admissible = false;

  Eigen::RowVectorXd Kx() const { return K.head(K.size() - 1); }
  double Kz() const { return K(K.size() - 1); }
};

/// Throws std::invalid_argument if mu <= 0.
ForwardingDesign gain(const AbstractSystem& sys, const Eigen::RowVectorXd& M, double mu,
                      const AuditTolerances& tol = {});

/// forwarding_operator + gain.
ForwardingDesign design(const AbstractSystem& sys, double mu, const AuditTolerances& tol = {});

/// u = -B^T P x + mu B^T M^T (z - M x), evaluated term by term (not via K).
double control(const AbstractSystem& sys, const ForwardingDesign& design,
               const ExtendedState& state);

/// (A x + B psi(u), C x)
ExtendedState closed_loop_field(const AbstractSystem& sys, const ForwardingDesign& design,
                                const Nonlinearity& psi, const ExtendedState& state);

/// [[A + B Kx, B Kz], [C, 0]], the closed loop when psi is the identity.
Eigen::MatrixXd closed_loop_matrix(const AbstractSystem& sys, const ForwardingDesign& design);

/// <P x1, x2> + mu (z1 - M x1)(z2 - M x2)
double v_inner(const AbstractSystem& sys, const ForwardingDesign& design,
               const ExtendedState& xi1, const ExtendedState& xi2);

/// Gram matrix Q of the V-inner product on [x; z].
Eigen::MatrixXd v_gram(const AbstractSystem& sys, const ForwardingDesign& design);

/// Extremal eigenvalues of the V-form against the Euclidean form on [x; z]:
/// v_lo |xi|^2 <= <xi, xi>_V <= v_hi |xi|^2.
///
/// The sum norm |x| + |z| is equivalent to the Euclidean norm of
/// [x; z] with constants 1 and sqrt(2), so these bounds transfer directly.
struct NormEquivalence {
  double v_lo = 0.0;
  double v_hi = 0.0;
  bool weakly_coercive = false;  // v_lo below weak_threshold * v_hi

  /// sup_t |xi(t)| <= stability_constant() * |xi(0)| for a V-contraction.
  double stability_constant() const;
};

NormEquivalence norm_equivalence(const AbstractSystem& sys, const ForwardingDesign& design,
                                 double weak_threshold = 1e-8);

struct ProbeResult {
  /// max of <F(xi1) - F(xi2), xi1 - xi2>_V
  double worst_inner = 0.0;
  /// max of the same quantity divided by (1 + |xi1 - xi2|^2)
  double worst_scaled = 0.0;
  int samples = 0;
};

/// Samples random pairs with components ~ N(0, scale^2) and reports the worst
/// V-monotonicity of the closed-loop field. Theory predicts <= 0.
ProbeResult dissipativity_probe(const AbstractSystem& sys, const ForwardingDesign& design,
                                const Nonlinearity& psi, int sample_count, std::uint64_t seed,
                                double scale = 3.0);

}  // namespace satint
