#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace satint::cli {

enum class Command { wave_run, wave_sweep, abstract_check, abstract_run };

Command parse_command(const std::string& name);

struct RunManifest {
  Command command = Command::wave_run;
  std::filesystem::path config_path;
  std::filesystem::path output_dir = "out";
  bool emit_plots = false;
  std::uint64_t seed = 0;
};

enum ExitCode : int {
  success = 0,
  config_error = 2,
  assumption_violation = 3,
  numerical_failure = 4,
};

/// Executes one command. All failures are reported on `err` and mapped to
/// an ExitCode; nothing propagates.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

}  // namespace satint::cli
