#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "satint/cli.hpp"

using namespace satint;
namespace fs = std::filesystem;

namespace {

const fs::path configs = fs::path(SATINT_SOURCE_DIR) / "configs";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(cli::Command cmd, const fs::path& config, const fs::path& out_dir, bool plots = false) {
  cli::RunManifest m;
  m.command = cmd;
  m.config_path = config;
  m.output_dir = out_dir;
  m.emit_plots = plots;
  std::ostringstream out, err;
  const int code = cli::run(m, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("satint_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t line_count(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path write_cfg(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST_CASE("command names") {
  CHECK(cli::parse_command("wave_run") == cli::Command::wave_run);
  CHECK(cli::parse_command("abstract_check") == cli::Command::abstract_check);
  CHECK_THROWS(cli::parse_command("frobnicate"));
}

TEST_CASE("wave_run on the reference experiment") {
  const auto dir = scratch("fig1");
  const auto r = run(cli::Command::wave_run, configs / "fig1.cfg", dir, true);
  CHECK(r.code == cli::success);
  CHECK(r.out.find("0 violation(s)") != std::string::npos);
  CHECK(line_count(dir / "diagnostics.csv") == 10002);
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "snapshots" / "y_0000.csv"));
  CHECK(fs::exists(dir / "snapshots" / "y_0040.csv"));
  for (const char* f : {"y_l2.svg", "z.svg", "u_psi.svg", "lyapunov.svg"}) CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "y_l2.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("identical runs write identical bytes") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run(cli::Command::wave_run, configs / "fig1.cfg", a).code == 0);
  REQUIRE(run(cli::Command::wave_run, configs / "fig1.cfg", b).code == 0);
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / "snapshots" / "y_0017.csv") == slurp(b / "snapshots" / "y_0017.csv"));

  const auto c = scratch("det_c"), d = scratch("det_d");
  REQUIRE(run(cli::Command::abstract_run, configs / "rotor_run.cfg", c).code == 0);
  REQUIRE(run(cli::Command::abstract_run, configs / "rotor_run.cfg", d).code == 0);
  CHECK(slurp(c / "trajectory.csv") == slurp(d / "trajectory.csv"));
}

TEST_CASE("open-loop config reports conservation") {
  const auto r = run(cli::Command::wave_run, configs / "openloop_mode.cfg", scratch("open"));
  CHECK(r.code == cli::success);
  CHECK(r.out.find("open-loop energy conservation") != std::string::npos);
  CHECK(r.out.find("-> PASS") != std::string::npos);
  CHECK(r.out.find("-> FAIL") == std::string::npos);
}

TEST_CASE("missing or broken configs exit with a config error") {
  CHECK(run(cli::Command::wave_run, configs / "no_such.cfg", scratch("missing")).code ==
        cli::config_error);
  const auto dir = scratch("broken");
  const auto bad = write_cfg(dir, "bad.cfg", "dx = 0.002\ndt = 0.004\n");
  const auto r = run(cli::Command::wave_run, bad, dir / "out");
  CHECK(r.code == cli::config_error);
  CHECK(r.err.find("CFL") != std::string::npos);
}

TEST_CASE("sweep table") {
  const auto dir = scratch("sweep");
  const auto r = run(cli::Command::wave_sweep, configs / "fig2.cfg", dir);
  CHECK(r.code == cli::success);
  CHECK(line_count(dir / "sweep.csv") == 4);
  CHECK(r.out.find("0.600") != std::string::npos);
}

TEST_CASE("single-element sweep matches wave_run") {
  const auto dir = scratch("single");
  const std::string body = "t_end = 4\ndx = 0.004\ndt = 0.004\nmu = 0.3\n";
  const auto sweep_cfg = write_cfg(dir, "s.cfg", body + "mus = 0.3\n");
  const auto run_cfg = write_cfg(dir, "r.cfg", body);
  REQUIRE(run(cli::Command::wave_sweep, sweep_cfg, dir / "s").code == 0);
  REQUIRE(run(cli::Command::wave_run, run_cfg, dir / "r").code == 0);
  const auto summary = slurp(dir / "r" / "summary.txt");
  const auto csv = slurp(dir / "s" / "sweep.csv");
  const auto row = csv.substr(csv.find('\n') + 1);
  const auto z_min = row.substr(row.find(',') + 1, row.find(',', row.find(',') + 1) - row.find(',') - 1);
  CHECK(summary.find("z_min=" + z_min) != std::string::npos);
}

TEST_CASE("empty mu list is a config error") {
  const auto dir = scratch("empty_mus");
  CHECK(run(cli::Command::wave_sweep, write_cfg(dir, "e.cfg", "mus =\n"), dir / "o").code ==
        cli::config_error);
  CHECK(run(cli::Command::wave_sweep, write_cfg(dir, "n.cfg", "t_end = 1\n"), dir / "o").code ==
        cli::config_error);
}

TEST_CASE("assumption audits") {
  auto r = run(cli::Command::abstract_check, configs / "rotor_check.cfg", scratch("rotor"));
  CHECK(r.code == cli::success);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(fs::exists(scratch("rotor").parent_path()));

  const auto dir = scratch("nonobs");
  r = run(cli::Command::abstract_check, configs / "nonobservable4_check.cfg", dir);
  CHECK(r.code == cli::assumption_violation);
  CHECK(slurp(dir / "assumptions.txt").find("observable=false") != std::string::npos);

  const auto bad_dir = scratch("malformed");
  fs::create_directories(bad_dir);
  std::ofstream(bad_dir / "A.txt") << "0 1\n-1\n";
  const auto cfg = write_cfg(bad_dir, "m.cfg",
                             "A = A.txt\nB = " + (configs / "rotor" / "B.txt").string() +
                                 "\nC = " + (configs / "rotor" / "C.txt").string() +
                                 "\nP = " + (configs / "rotor" / "P.txt").string() + "\n");
  CHECK(run(cli::Command::abstract_check, cfg, bad_dir / "o").code == cli::config_error);
}

TEST_CASE("abstract runs") {
  const auto dir = scratch("arun");
  auto r = run(cli::Command::abstract_run, configs / "rotor_run.cfg", dir, true);
  CHECK(r.code == cli::success);
  CHECK(r.out.find("-> PASS") != std::string::npos);
  CHECK(line_count(dir / "trajectory.csv") == 2002);
  CHECK(fs::exists(dir / "states.svg"));

  const auto zero = scratch("azero");
  r = run(cli::Command::abstract_run, configs / "rotor_zero.cfg", zero);
  CHECK(r.code == cli::success);
  std::istringstream is(slurp(zero / "trajectory.csv"));
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.substr(line.find(',')) == ",0,0,0,0,0,0");
  }
  CHECK(rows == 101);

  r = run(cli::Command::abstract_run, configs / "inadmissible_run.cfg", scratch("inadm"));
  CHECK(r.code == cli::assumption_violation);
  CHECK(r.err.find("C A^-1 B") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch("inadm") / "trajectory.csv"));

  r = run(cli::Command::abstract_run, configs / "rotor_check.cfg", scratch("nox0"));
  CHECK(r.code == cli::config_error);
}
