#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace satint {

/// Scalar actuator nonlinearity psi acting on the control input.
///
/// An admissible psi vanishes only at zero, is globally Lipschitz with the
/// declared constant, and is monotone non-decreasing. The provided kinds are
/// all odd and admissible except `off`, which models an open loop (psi == 0).
class Nonlinearity {
 public:
  enum class Kind { saturation, identity, scaled_sigmoid, off, custom };

  static Nonlinearity saturation(double level);
  static Nonlinearity identity();
  /// s -> level * tanh(s / level)
  static Nonlinearity scaled_sigmoid(double level);
  static Nonlinearity off();
  /// Arbitrary function, mainly for tests. Nothing is assumed about it.
  static Nonlinearity custom(std::function<double(double)> fn, double lipschitz,
                             std::string name, bool bounded = false);

  /// Throws std::domain_error on non-finite input.
  double operator()(double s) const;
  double eval(double s) const { return (*this)(s); }

  Kind kind() const { return kind_; }
  double level() const { return level_; }
  double lipschitz() const { return lipschitz_; }
  bool bounded() const { return bounded_; }
  const std::string& name() const { return name_; }

 private:
  Nonlinearity(Kind kind, double level, double lipschitz, bool bounded,
               std::string name);

  Kind kind_;
  double level_;
  double lipschitz_;
  bool bounded_;
  std::string name_;
  std::function<double(double)> fn_;
};

/// Parses `sat`, `id`, `tanh`, `off` (level ignored for id/off).
Nonlinearity make_nonlinearity(const std::string& kind, double level);

struct PropertyReport {
  double value_at_zero = 0.0;
  bool vanishes_at_zero = false;

  double max_lipschitz_ratio = 0.0;
  bool lipschitz_ok = false;

  double min_monotonicity_product = 0.0;
  bool monotone_ok = false;

  /// Reported, not required.
  bool bounded = false;

  bool all_ok() const { return vanishes_at_zero && lipschitz_ok && monotone_ok; }
};

/// Sampled audit of the three admissibility properties over `samples`.
PropertyReport verify_properties(const Nonlinearity& psi,
                                 std::span<const std::pair<double, double>> samples,
                                 double tol);

}  // namespace satint
