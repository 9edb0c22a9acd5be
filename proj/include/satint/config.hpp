#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "satint/abstract_core.hpp"
#include "satint/integrator.hpp"
#include "satint/wave.hpp"

namespace satint {

/// Flat `key = value` configuration. `#` starts a comment; blank lines are
/// ignored; duplicate keys are an error. Every key must be consumed by the
/// loader that reads the file (see ensure_all_used), so typos surface as
/// ConfigError instead of silently falling back to defaults.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source,
                              std::filesystem::path base_dir = {});
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  /// Comma- or whitespace-separated reals.
  std::vector<double> get_list(const std::string& key) const;
  /// Path value resolved against the directory of the config file.
  std::filesystem::path get_path(const std::string& key) const;

  void ensure_all_used() const;
  const std::string& source() const { return source_; }

 private:
  const std::string& raw(const std::string& key) const;

  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// Keys: dx, dt, t_end, mu, psi.kind, psi.level, y0, y0.file, v0, v0.file,
/// z0, record_stride, snapshot_stride. `mus` and `settle_eps` are accepted
/// (and marked used) for sweep configs.
wave::WaveConfig wave_config_from(const KeyValueConfig& kv);

struct AbstractRunConfig {
  AbstractSystem sys;
  std::optional<double> mu;
  Nonlinearity psi = Nonlinearity::saturation(0.2);
  std::optional<ExtendedState> xi0;
  IntegratorConfig integ;
  int probe_samples = 1000;
};

/// Keys: A, B, C, P (matrix file paths), mu, psi.kind, psi.level, x0, z0,
/// dt, t_end, scheme, record_stride, probe.samples.
AbstractRunConfig abstract_config_from(const KeyValueConfig& kv);

}  // namespace satint
