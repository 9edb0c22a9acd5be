#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"

#include "satint/errors.hpp"
#include "satint/wave.hpp"

using namespace satint;
using namespace satint::wave;

namespace {

WaveConfig fig1() {
  WaveConfig c;
  c.dx = 0.002;
  c.dt = 0.002;
  c.t_end = 20.0;
  c.mu = 0.3;
  c.psi = Nonlinearity::saturation(0.2);
  c.y0 = {Profile::linear_x, {}};
  c.v0 = {Profile::zero, {}};
  return c;
}

WaveState uniform(int cells, double y, double v, double z) {
  WaveState s;
  s.y = Eigen::VectorXd::Constant(cells + 1, y);
  s.v = Eigen::VectorXd::Constant(cells + 1, v);
  s.y(0) = 0.0;
  s.z = z;
  return s;
}

double max_mode_error(const WaveState& s) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < s.y.size(); ++i) {
    const double x = static_cast<double>(i) * s.dx();
    err = std::max(err, std::abs(s.y(i) - analytic_mode(x, s.t).first));
  }
  return err;
}

WaveState run_to(WaveConfig cfg, double t) {
  WaveState s = init(cfg);
  const long long n = std::llround(t / cfg.dt);
  for (long long k = 0; k < n; ++k) step_in_place(s, cfg);
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = fig1();
  CHECK_NOTHROW(c.validate());
  CHECK(c.cells() == 500);
  CHECK(c.steps() == 10000);
  c.dt = 0.0021;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig1();
  c.dx = 0.003;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig1();
  c.mu = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig1();
  c.record_stride = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_profile("eigenmode") == Profile::eigenmode);
  CHECK_THROWS_AS(parse_profile("sine"), std::invalid_argument);
}

TEST_CASE("initial profiles") {
  auto c = fig1();
  auto s = init(c);
  REQUIRE(s.y.size() == 501);
  for (Eigen::Index i = 0; i <= 500; ++i) CHECK(s.y(i) == doctest::Approx(0.002 * static_cast<double>(i)));
  CHECK(s.v.isZero(0.0));
  CHECK(s.z == 0.0);

  c.y0 = {Profile::eigenmode, {}};
  s = init(c);
  for (Eigen::Index i = 0; i <= 500; i += 50) {
    CHECK(s.y(i) == doctest::Approx(std::sin(std::numbers::pi * 0.002 * static_cast<double>(i) / 2)));
  }

  c.y0 = {Profile::custom, std::vector<double>(501, 0.0)};
  s = init(c);
  CHECK(s.y.isZero(0.0));

  c.y0 = {Profile::custom, std::vector<double>(501, 1.0)};
  CHECK_THROWS_AS(init(c), std::invalid_argument);
  c.y0 = {Profile::custom, std::vector<double>(10, 0.0)};
  CHECK_THROWS_AS(init(c), std::invalid_argument);
}

TEST_CASE("boundary control law") {
  const auto s0 = init(fig1());
  CHECK(control(s0, 0.3) == 0.0);
  CHECK(control(uniform(500, 0.0, 1.0, 0.0), 0.3) == doctest::Approx(-1.15).epsilon(1e-13));
  CHECK(control(uniform(500, 0.0, 0.0, 1.0), 0.3) == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("energy") {
  CHECK(energy(init(fig1())) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(energy(uniform(500, 0.0, 0.0, 0.0)) == 0.0);
  auto c = fig1();
  c.y0 = {Profile::eigenmode, {}};
  CHECK(std::abs(energy(init(c)) - std::numbers::pi * std::numbers::pi / 16) <= 1e-4);
}

TEST_CASE("forwarding functional") {
  CHECK(m_functional(uniform(500, 0.0, 0.0, 0.0)) == 0.0);
  CHECK(m_functional(uniform(500, 0.0, 1.0, 0.0)) == doctest::Approx(-0.5).epsilon(1e-13));
  auto s = uniform(500, 0.0, 0.0, 0.0);
  for (Eigen::Index i = 0; i < s.v.size(); ++i) s.v(i) = static_cast<double>(i) * s.dx();
  CHECK(std::abs(m_functional(s) + 1.0 / 3.0) <= s.dx() * s.dx());
}

TEST_CASE("Lyapunov functional") {
  CHECK(lyapunov(uniform(500, 0.0, 0.0, 0.0), 0.3) == 0.0);
  CHECK(lyapunov(init(fig1()), 0.3) == doctest::Approx(0.5).epsilon(1e-13));
  auto s = uniform(500, 0.0, 1.0, 0.0);
  s.v(0) = 0.0;
  // v = 1 on every node but the clamped one; the kinetic energy and moment
  // differ from the constant field only by O(dx).
  const auto full = uniform(500, 0.0, 1.0, 0.0);
  CHECK(energy(full) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m_functional(full) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(lyapunov(full, 0.3) == doctest::Approx(0.5375).epsilon(1e-13));
  CHECK(std::abs(lyapunov(s, 0.3) - 0.5375) < 1e-3);
}

TEST_CASE("diagnostics row is internally consistent") {
  auto c = fig1();
  auto s = init(c);
  for (int k = 0; k < 700; ++k) step_in_place(s, c);
  const auto r = diagnose(s, c);
  CHECK(r.V == 0.5 * c.mu * (r.z - r.Mfun) * (r.z - r.Mfun) + r.E);
  CHECK(r.u == control(s, c.mu));
  CHECK(r.psi_u == c.psi(r.u));
  CHECK(r.E == energy(s));
  CHECK(r.y_l2 == l2_norm(s.y));
}

TEST_CASE("analytic mode") {
  auto a = analytic_mode(1.0, 0.0);
  CHECK(a.first == doctest::Approx(1.0));
  CHECK(a.second == doctest::Approx(0.0));
  a = analytic_mode(0.0, 1.234);
  CHECK(a.first == 0.0);
  CHECK(a.second == 0.0);
  a = analytic_mode(1.0, 2.0);
  CHECK(a.first == doctest::Approx(-1.0));
  CHECK(std::abs(a.second) < 1e-12);
  // It solves the wave equation: y_tt = y_xx = -(pi/2)^2 y.
  const double h = 1e-4, x = 0.37, t = 0.81;
  const double ytt = (analytic_mode(x, t + h).first - 2 * analytic_mode(x, t).first +
                      analytic_mode(x, t - h).first) / (h * h);
  const double yxx = (analytic_mode(x + h, t).first - 2 * analytic_mode(x, t).first +
                      analytic_mode(x - h, t).first) / (h * h);
  CHECK(ytt == doctest::Approx(yxx).epsilon(1e-5));
}

TEST_CASE("zero state is a bitwise fixed point") {
  auto c = fig1();
  c.y0 = {Profile::zero, {}};
  WaveState s = init(c);
  for (int k = 0; k < 100; ++k) {
    const WaveState next = step(s, c);
    CHECK(next.y == s.y);
    CHECK(next.v == s.v);
    CHECK(next.z == s.z);
    s = next;
  }
}

TEST_CASE("one step from the linear profile leaves the interior at rest") {
  const auto c = fig1();
  const auto s0 = init(c);
  const auto s1 = step(s0, c);
  for (Eigen::Index i = 1; i < 500; ++i) CHECK(std::abs(s1.y(i) - s0.y(i)) <= 1e-15);
  // The boundary kick reaches node N-1 within the step at Courant 1.
  for (Eigen::Index i = 1; i < 499; ++i) CHECK(std::abs(s1.v(i)) <= 1e-12);
  CHECK(s1.t == doctest::Approx(c.dt));
}

TEST_CASE("Dirichlet end stays clamped") {
  const auto c = fig1();
  auto s = init(c);
  for (int k = 0; k < 2000; ++k) {
    step_in_place(s, c);
    REQUIRE(s.y(0) == 0.0);
    REQUIRE(s.v(0) == 0.0);
  }
}

TEST_CASE("open-loop eigenmode returns after one period") {
  auto c = fig1();
  c.psi = Nonlinearity::off();
  c.y0 = {Profile::eigenmode, {}};
  const auto s = run_to(c, 4.0);
  CHECK(s.t == doctest::Approx(4.0));
  CHECK(max_mode_error(s) <= 1e-2);
  const auto s0 = init(c);
  CHECK((s.y - s0.y).lpNorm<Eigen::Infinity>() <= 1e-2);
}

TEST_CASE("eigenmode error shrinks under mesh halving") {
  auto c = fig1();
  c.psi = Nonlinearity::off();
  c.y0 = {Profile::eigenmode, {}};
  double prev = 0.0;
  for (double dx : {0.004, 0.002, 0.001}) {
    c.dx = dx;
    c.dt = dx / 2;
    const double err = max_mode_error(run_to(c, 4.0));
    CAPTURE(dx);
    CAPTURE(err);
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("steps that violate CFL are rejected") {
  auto c = fig1();
  const auto s = init(c);
  c.dt = 0.003;
  CHECK_THROWS_AS(step(s, c), std::invalid_argument);
}

TEST_CASE("closed-loop run: decay, balance and determinism") {
  const auto c = fig1();
  const auto run = simulate(c);
  REQUIRE(run.rows.size() == 10001);
  CHECK(run.rows.back().t == doctest::Approx(20.0));
  CHECK(run.rows.back().y_l2 <= 0.05);
  CHECK(std::abs(run.rows.back().z) <= 0.05);

  const double tol = 1e-6 * (1 + run.rows.front().V);
  int bad = 0;
  for (std::size_t k = 1; k < run.rows.size(); ++k) bad += run.rows[k].V - run.rows[k - 1].V > tol;
  CHECK(bad == 0);

  // Summed discrete forwarding balance is first order in the mesh.
  CHECK(run.forwarding_residual <= 5.0 * c.dx);

  const auto again = simulate(c);
  std::ostringstream a, b;
  write_csv(a, run.rows);
  write_csv(b, again.rows);
  CHECK(a.str() == b.str());
}

TEST_CASE("forwarding residual converges with the mesh") {
  auto c = fig1();
  c.t_end = 8.0;
  c.dx = c.dt = 0.004;
  const double coarse = simulate(c).forwarding_residual;
  c.dx = c.dt = 0.002;
  const double fine = simulate(c).forwarding_residual;
  CAPTURE(coarse);
  CAPTURE(fine);
  CHECK(coarse / fine >= 1.8);
  CHECK(fine <= 5.0 * c.dx);
}

TEST_CASE("open-loop energy is conserved") {
  auto c = fig1();
  c.psi = Nonlinearity::off();
  c.y0 = {Profile::eigenmode, {}};
  const auto run = simulate(c);
  const double e0 = run.rows.front().E;
  double drift = 0.0;
  for (const auto& r : run.rows) drift = std::max(drift, std::abs(r.E - e0) / e0);
  CHECK(drift <= 1e-3);
}

TEST_CASE("record and snapshot strides") {
  auto c = fig1();
  c.t_end = 1.0;
  c.record_stride = 7;
  c.snapshot_stride = 100;
  const auto run = simulate(c);
  // steps 0, 7, ..., 497 plus the final step 500
  CHECK(run.rows.size() == 73);
  CHECK(run.rows.back().t == doctest::Approx(1.0));
  CHECK(run.snapshots.size() == 6);
  CHECK(run.snapshots[1].t == doctest::Approx(0.2));
}

TEST_CASE("CSV writers") {
  auto c = fig1();
  c.t_end = 0.004;
  c.snapshot_stride = 1;
  const auto run = simulate(c);
  std::ostringstream os;
  write_csv(os, run.rows);
  CHECK(os.str().rfind("t,u,psi_u,E,M,V,z,y_l2,v_l2\n", 0) == 0);
  std::ostringstream snap;
  write_snapshot(snap, run.snapshots.back());
  std::istringstream is(snap.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) ++n;
  CHECK(n == 502);
}
