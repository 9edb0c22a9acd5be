#include <iostream>

#include <CLI11.hpp>

#include "satint/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Saturated integral-action forwarding control: wave and matrix experiments"};
  app.require_subcommand(1);

  satint::cli::RunManifest manifest;
  std::string config;
  std::string out_dir = "out";
  bool plots = false;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"wave_run", "simulate the boundary-controlled wave equation"},
      {"wave_sweep", "compare wave runs over a list of mu values"},
      {"abstract_check", "audit the structural assumptions of a matrix system"},
      {"abstract_run", "integrate the saturated closed loop of a matrix system"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_flag("--plots", plots, "also write SVG plots");
    sub->add_option("--seed", seed, "seed for randomized probes")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : satint::cli::config_error;
  }

  manifest.command = satint::cli::parse_command(app.get_subcommands().front()->get_name());
  manifest.config_path = config;
  manifest.output_dir = out_dir;
  manifest.emit_plots = plots;
  manifest.seed = seed;
  return satint::cli::run(manifest, std::cout, std::cerr);
}
