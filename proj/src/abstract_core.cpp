#include "satint/abstract_core.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "satint/errors.hpp"

namespace satint {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

void require_dim(const AbstractSystem& sys, const ExtendedState& xi, const char* what) {
  if (xi.x.size() != sys.dim()) {
    throw std::invalid_argument(fmt::format("{}: state has dimension {}, system has {}", what,
                                            xi.x.size(), sys.dim()));
  }
}

void require_design(const AbstractSystem& sys, const ForwardingDesign& d) {
  if (d.M.size() != sys.dim() || d.K.size() != sys.dim() + 1) {
    throw std::invalid_argument("forwarding design does not match system dimension");
  }
  if (!d.admissible) {
    throw AssumptionError(fmt::format(
        "inadmissible design: C A^-1 B = {} is zero, integral action cannot be stabilized",
        d.mB));
  }
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m, double rel) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel * s(0)) ++r;
  }
  return r;
}

}  // namespace

AbstractSystem::AbstractSystem(Eigen::MatrixXd A_, Eigen::VectorXd B_, Eigen::RowVectorXd C_,
                               Eigen::MatrixXd P_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), P(std::move(P_)) {
  const auto n = A.rows();
  if (n == 0 || A.cols() != n) {
    throw std::invalid_argument(fmt::format("A must be square and non-empty, got {}x{}", A.rows(), A.cols()));
  }
  if (B.size() != n) throw std::invalid_argument(fmt::format("B must have {} rows, got {}", n, B.size()));
  if (C.size() != n) throw std::invalid_argument(fmt::format("C must have {} columns, got {}", n, C.size()));
  if (P.rows() != n || P.cols() != n) {
    throw std::invalid_argument(fmt::format("P must be {0}x{0}, got {1}x{2}", n, P.rows(), P.cols()));
  }
  if (!all_finite(A) || !all_finite(B) || !all_finite(C) || !all_finite(P)) {
    throw std::invalid_argument("system matrices contain non-finite entries");
  }
}

ExtendedState ExtendedState::from_vector(const Eigen::VectorXd& xi) {
  if (xi.size() < 2) throw std::invalid_argument("extended state needs at least 2 entries");
  return {xi.head(xi.size() - 1), xi(xi.size() - 1)};
}

Eigen::VectorXd ExtendedState::to_vector() const {
  Eigen::VectorXd xi(x.size() + 1);
  xi << x, z;
  return xi;
}

AssumptionReport validate_assumptions(const AbstractSystem& sys, const AuditTolerances& tol) {
  AssumptionReport r;
  const auto n = sys.dim();
  r.dimension = n;

  const double p_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(sys.P).singularValues()(0);
  const Eigen::MatrixXd p_sym = 0.5 * (sys.P + sys.P.transpose());

  r.symmetric = (sys.P - sys.P.transpose()).norm() <= tol.symmetry * std::max(1.0, sys.P.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eig(p_sym, Eigen::EigenvaluesOnly);
  r.min_eigenvalue_p = p_eig.eigenvalues().minCoeff();
  r.coercive = r.symmetric && r.min_eigenvalue_p > 0.0;

  const Eigen::MatrixXd lyap = sys.A.transpose() * p_sym + p_sym * sys.A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> l_eig(0.5 * (lyap + lyap.transpose()),
                                                       Eigen::EigenvaluesOnly);
  r.dissipation_eigenvalue = l_eig.eigenvalues().maxCoeff();
  r.dissipative = r.dissipation_eigenvalue <= tol.dissipativity * p_norm;

  Eigen::JacobiSVD<Eigen::MatrixXd> a_svd(sys.A);
  const auto& sv = a_svd.singularValues();
  r.min_singular_value = sv(sv.size() - 1);
  r.invertible = sv(0) > 0.0 && r.min_singular_value > tol.invertibility * sv(0);

  // Kalman observability matrix of (A, B^T P).
  const Eigen::RowVectorXd out = sys.B.transpose() * sys.P;
  Eigen::MatrixXd obs(n, n);
  Eigen::RowVectorXd row = out;
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.row(i) = row;
    row = row * sys.A;
  }
  r.observability_rank = numerical_rank(obs, tol.rank);
  r.observable = r.observability_rank == n;

  if (r.invertible) {
    const Eigen::RowVectorXd M = forwarding_operator(sys, tol);
    r.steady_state_gain = M.dot(sys.B);
    r.steady_state_gain_nonzero =
        std::abs(r.steady_state_gain) > tol.steady_state_gain * M.norm() * sys.B.norm();
  } else {
    r.steady_state_gain = std::numeric_limits<double>::quiet_NaN();
    r.steady_state_gain_nonzero = false;
  }
  return r;
}

std::string AssumptionReport::to_table() const {
  auto mark = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::ostringstream os;
  os << fmt::format("{:<28} {:<6} {}\n", "check", "status", "witness");
  os << fmt::format("{:<28} {:<6} lambda_max(A'P+PA) = {:.6g}\n", "dissipative", mark(dissipative),
                    dissipation_eigenvalue);
  os << fmt::format("{:<28} {:<6} sigma_min(A) = {:.6g}\n", "invertible", mark(invertible),
                    min_singular_value);
  os << fmt::format("{:<28} {:<6} lambda_min(P) = {:.6g}, symmetric = {}\n", "coercive",
                    mark(coercive), min_eigenvalue_p, symmetric);
  os << fmt::format("{:<28} {:<6} {}\n", "compact injection", "PASS", compact_injection);
  os << fmt::format("{:<28} {:<6} rank = {} / {}\n", "observable (A, B'P)", mark(observable),
                    observability_rank, dimension);
  os << fmt::format("{:<28} {:<6} C A^-1 B = {:.6g}\n", "steady-state gain nonzero",
                    mark(steady_state_gain_nonzero), steady_state_gain);
  return os.str();
}

std::string AssumptionReport::to_key_value() const {
  std::ostringstream os;
  os << fmt::format("dissipative={}\n", dissipative);
  os << fmt::format("dissipation_eigenvalue={:.17g}\n", dissipation_eigenvalue);
  os << fmt::format("invertible={}\n", invertible);
  os << fmt::format("min_singular_value={:.17g}\n", min_singular_value);
  os << fmt::format("coercive={}\n", coercive);
  os << fmt::format("symmetric={}\n", symmetric);
  os << fmt::format("min_eigenvalue_p={:.17g}\n", min_eigenvalue_p);
  os << fmt::format("compact_injection={}\n", compact_injection);
  os << fmt::format("observable={}\n", observable);
  os << fmt::format("observability_rank={}\n", observability_rank);
  os << fmt::format("dimension={}\n", dimension);
  os << fmt::format("steady_state_gain_nonzero={}\n", steady_state_gain_nonzero);
  os << fmt::format("steady_state_gain={:.17g}\n", steady_state_gain);
  os << fmt::format("all_green={}\n", all_green());
  return os.str();
}

Eigen::RowVectorXd forwarding_operator(const AbstractSystem& sys, const AuditTolerances& tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= tol.invertibility * sv(0)) {
    throw AssumptionError(fmt::format(
        "A is singular (sigma_min = {:.3g}); the forwarding operator M = C A^-1 needs an "
        "invertible A",
        sv(sv.size() - 1)));
  }
  const Eigen::VectorXd Mt = sys.A.transpose().colPivHouseholderQr().solve(sys.C.transpose());
  Eigen::RowVectorXd M = Mt.transpose();

  const double residual = (M * sys.A - sys.C).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, M.lpNorm<Eigen::Infinity>() * sys.A.lpNorm<Eigen::Infinity>());
  if (residual > 1e-10 * scale) {
    throw NumericalError(fmt::format("forwarding solve residual {:.3g} too large", residual));
  }
  return M;
}

ForwardingDesign gain(const AbstractSystem& sys, const Eigen::RowVectorXd& M, double mu,
                      const AuditTolerances& tol) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument(fmt::format("mu must be positive, got {}", mu));
  }
  if (M.size() != sys.dim()) throw std::invalid_argument("M has wrong dimension");

  ForwardingDesign d;
  d.M = M;
  d.mu = mu;
  d.mB = M.dot(sys.B);  // B^T M^T as a scalar

  const auto n = sys.dim();
  d.K.resize(n + 1);
  d.K.head(n) = -sys.B.transpose() * sys.P - mu * d.mB * M;
  d.K(n) = mu * d.mB;
  d.admissible = std::abs(d.mB) > tol.steady_state_gain * M.norm() * sys.B.norm();
  return d;
}

ForwardingDesign design(const AbstractSystem& sys, double mu, const AuditTolerances& tol) {
  return gain(sys, forwarding_operator(sys, tol), mu, tol);
}

double control(const AbstractSystem& sys, const ForwardingDesign& d, const ExtendedState& xi) {
  require_design(sys, d);
  require_dim(sys, xi, "control");
  const double energy_term = -sys.B.dot(sys.P * xi.x);
  const double forwarding_term = d.mu * d.mB * (xi.z - d.M.dot(xi.x));
  return energy_term + forwarding_term;
}

ExtendedState closed_loop_field(const AbstractSystem& sys, const ForwardingDesign& d,
                                const Nonlinearity& psi, const ExtendedState& xi) {
  const double u = control(sys, d, xi);
  return {sys.A * xi.x + sys.B * psi(u), sys.C.dot(xi.x)};
}

Eigen::MatrixXd closed_loop_matrix(const AbstractSystem& sys, const ForwardingDesign& d) {
  require_design(sys, d);
  const auto n = sys.dim();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n + 1, n + 1);
  F.topLeftCorner(n, n) = sys.A + sys.B * d.Kx();
  F.topRightCorner(n, 1) = sys.B * d.Kz();
  F.bottomLeftCorner(1, n) = sys.C;
  return F;
}

double v_inner(const AbstractSystem& sys, const ForwardingDesign& d, const ExtendedState& xi1,
               const ExtendedState& xi2) {
  require_design(sys, d);
  require_dim(sys, xi1, "v_inner");
  require_dim(sys, xi2, "v_inner");
  return xi1.x.dot(sys.P * xi2.x) + d.mu * (xi1.z - d.M.dot(xi1.x)) * (xi2.z - d.M.dot(xi2.x));
}

Eigen::MatrixXd v_gram(const AbstractSystem& sys, const ForwardingDesign& d) {
  require_design(sys, d);
  const auto n = sys.dim();
  // mu (z - M x)^2 = mu [x; z]^T [-M 1]^T [-M 1] [x; z]
  Eigen::RowVectorXd w(n + 1);
  w << -d.M, 1.0;
  Eigen::MatrixXd Q = d.mu * w.transpose() * w;
  Q.topLeftCorner(n, n) += sys.P;
  return Q;
}

double NormEquivalence::stability_constant() const {
  if (!(v_lo > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(v_hi / v_lo);
}

NormEquivalence norm_equivalence(const AbstractSystem& sys, const ForwardingDesign& d,
                                 double weak_threshold) {
  const Eigen::MatrixXd Q = v_gram(sys, d);
  const double asym = (Q - Q.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, Q.norm())) {
    throw NumericalError(fmt::format(
        "V-form Gram matrix is not symmetric (asymmetry {:.3g}); is P symmetric?", asym));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  NormEquivalence ne;
  ne.v_lo = eig.eigenvalues().minCoeff();
  ne.v_hi = eig.eigenvalues().maxCoeff();
  ne.weakly_coercive = ne.v_lo <= weak_threshold * ne.v_hi;
  return ne;
}

ProbeResult dissipativity_probe(const AbstractSystem& sys, const ForwardingDesign& d,
                                const Nonlinearity& psi, int sample_count, std::uint64_t seed,
                                double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  const auto n = sys.dim();
  auto draw = [&] {
    ExtendedState xi = ExtendedState::zero(n);
    for (Eigen::Index i = 0; i < n; ++i) xi.x(i) = normal(rng);
    xi.z = normal(rng);
    return xi;
  };

  ProbeResult res;
  res.worst_inner = -std::numeric_limits<double>::infinity();
  res.worst_scaled = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < sample_count; ++k) {
    const ExtendedState a = draw();
    const ExtendedState b = draw();
    const ExtendedState fa = closed_loop_field(sys, d, psi, a);
    const ExtendedState fb = closed_loop_field(sys, d, psi, b);
    const ExtendedState dx{a.x - b.x, a.z - b.z};
    const ExtendedState df{fa.x - fb.x, fa.z - fb.z};
    const double inner = v_inner(sys, d, df, dx);
    const double dist2 = dx.x.squaredNorm() + dx.z * dx.z;
    res.worst_inner = std::max(res.worst_inner, inner);
    res.worst_scaled = std::max(res.worst_scaled, inner / (1.0 + dist2));
  }
  res.samples = sample_count;
  return res;
}

}  // namespace satint
