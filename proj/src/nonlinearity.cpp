#include "satint/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace satint {

Nonlinearity::Nonlinearity(Kind kind, double level, double lipschitz, bool bounded,
                           std::string name)
    : kind_(kind), level_(level), lipschitz_(lipschitz), bounded_(bounded),
      name_(std::move(name)) {}

Nonlinearity Nonlinearity::saturation(double level) {
  if (!(level > 0.0) || !std::isfinite(level)) {
    throw std::invalid_argument(fmt::format("saturation level must be > 0, got {}", level));
  }
  return {Kind::saturation, level, 1.0, true, fmt::format("sat({})", level)};
}

Nonlinearity Nonlinearity::identity() { return {Kind::identity, 0.0, 1.0, false, "id"}; }

Nonlinearity Nonlinearity::scaled_sigmoid(double level) {
  if (!(level > 0.0) || !std::isfinite(level)) {
    throw std::invalid_argument(fmt::format("sigmoid level must be > 0, got {}", level));
  }
  return {Kind::scaled_sigmoid, level, 1.0, true, fmt::format("tanh({})", level)};
}

Nonlinearity Nonlinearity::off() { return {Kind::off, 0.0, 1.0, true, "off"}; }

Nonlinearity Nonlinearity::custom(std::function<double(double)> fn, double lipschitz,
                                  std::string name, bool bounded) {
  if (!fn) throw std::invalid_argument("custom nonlinearity needs a callable");
  Nonlinearity psi{Kind::custom, 0.0, lipschitz, bounded, std::move(name)};
  psi.fn_ = std::move(fn);
  return psi;
}

double Nonlinearity::operator()(double s) const {
  if (!std::isfinite(s)) {
    throw std::domain_error(fmt::format("nonlinearity {} evaluated at non-finite input", name_));
  }
  switch (kind_) {
    case Kind::saturation:
      return std::clamp(s, -level_, level_);
    case Kind::identity:
      return s;
    case Kind::scaled_sigmoid:
      return level_ * std::tanh(s / level_);
    case Kind::off:
      return 0.0;
    case Kind::custom:
      return fn_(s);
  }
  return 0.0;
}

Nonlinearity make_nonlinearity(const std::string& kind, double level) {
  if (kind == "sat") return Nonlinearity::saturation(level);
  if (kind == "id") return Nonlinearity::identity();
  if (kind == "tanh") return Nonlinearity::scaled_sigmoid(level);
  if (kind == "off") return Nonlinearity::off();
  throw std::invalid_argument(
      fmt::format("unknown nonlinearity kind '{}' (expected sat, id, tanh or off)", kind));
}

PropertyReport verify_properties(const Nonlinearity& psi,
                                 std::span<const std::pair<double, double>> samples,
                                 double tol) {
  if (samples.empty()) throw std::invalid_argument("verify_properties: no samples");

  PropertyReport report;
  report.value_at_zero = psi(0.0);
  report.max_lipschitz_ratio = 0.0;
  report.min_monotonicity_product = std::numeric_limits<double>::infinity();

  bool zero_elsewhere = false;
  for (const auto& [s1, s2] : samples) {
    if (!std::isfinite(s1) || !std::isfinite(s2)) {
      throw std::invalid_argument("verify_properties: non-finite sample");
    }
    const double p1 = psi(s1);
    const double p2 = psi(s2);
    zero_elsewhere = zero_elsewhere || (p1 == 0.0 && s1 != 0.0) || (p2 == 0.0 && s2 != 0.0);
    report.min_monotonicity_product =
        std::min(report.min_monotonicity_product, (p1 - p2) * (s1 - s2));
    if (s1 != s2) {
      report.max_lipschitz_ratio =
          std::max(report.max_lipschitz_ratio, std::abs(p1 - p2) / std::abs(s1 - s2));
    }
  }

  report.vanishes_at_zero = std::abs(report.value_at_zero) <= tol && !zero_elsewhere;
  report.lipschitz_ok = report.max_lipschitz_ratio <= psi.lipschitz() + tol;
  report.monotone_ok = report.min_monotonicity_product >= -tol;
  report.bounded = psi.bounded();
  return report;
}

}  // namespace satint
