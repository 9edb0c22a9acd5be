#include "satint/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "satint/errors.hpp"
#include "satint/matrix_io.hpp"

namespace satint {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return v;
}

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m, const std::string& name) {
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError(fmt::format("{} must be a vector, got {}x{}", name, m.rows(), m.cols()));
}

std::vector<double> read_samples(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  return {v.data(), v.data() + v.size()};
}

Nonlinearity psi_from(const KeyValueConfig& kv) {
  const std::string kind = kv.get_string("psi.kind", "sat");
  const double level = kv.get_double("psi.level", 0.2);
  try {
    return make_nonlinearity(kind, level);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", kv.source(), e.what()));
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source,
                                     std::filesystem::path base_dir) {
  KeyValueConfig kv;
  kv.source_ = source;
  kv.base_dir_ = std::move(base_dir);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, lineno));
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, lineno));
    if (!kv.values_.emplace(key, value).second) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", source, lineno, key));
    }
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  return parse(in, path.string(), path.parent_path());
}

bool KeyValueConfig::has(const std::string& key) const { return values_.contains(key); }

const std::string& KeyValueConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("{}: missing key '{}'", source_, key));
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return raw(key); }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return to_double(raw(key), fmt::format("{}: {}", source_, key));
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError(fmt::format("{}: {} must be an integer", source_, key));
  }
  return static_cast<int>(v);
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  std::string text = raw(key);
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok, fmt::format("{}: {}", source_, key)));
  return out;
}

std::filesystem::path KeyValueConfig::get_path(const std::string& key) const {
  std::filesystem::path p = raw(key);
  return p.is_absolute() ? p : base_dir_ / p;
}

void KeyValueConfig::ensure_all_used() const {
  for (const auto& [key, value] : values_) {
    if (!used_.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", source_, key));
  }
}

wave::WaveConfig wave_config_from(const KeyValueConfig& kv) {
  wave::WaveConfig cfg;
  cfg.dx = kv.get_double("dx", cfg.dx);
  cfg.dt = kv.get_double("dt", cfg.dt);
  cfg.t_end = kv.get_double("t_end", cfg.t_end);
  cfg.mu = kv.get_double("mu", cfg.mu);
  cfg.psi = psi_from(kv);
  cfg.z0 = kv.get_double("z0", cfg.z0);
  cfg.record_stride = kv.get_int("record_stride", cfg.record_stride);
  cfg.snapshot_stride = kv.get_int("snapshot_stride", cfg.snapshot_stride);

  auto profile = [&](const std::string& key, wave::ProfileSpec fallback) {
    if (!kv.has(key)) return fallback;
    wave::ProfileSpec p;
    try {
      p.kind = wave::parse_profile(kv.get_string(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}: {}", kv.source(), e.what()));
    }
    if (p.kind == wave::Profile::custom) p.samples = read_samples(kv.get_path(key + ".file"));
    return p;
  };
  cfg.y0 = profile("y0", cfg.y0);
  cfg.v0 = profile("v0", cfg.v0);

  // Sweep-only keys; read by the sweep command.
  if (kv.has("mus")) kv.get_list("mus");
  if (kv.has("settle_eps")) kv.get_double("settle_eps");

  kv.ensure_all_used();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", kv.source(), e.what()));
  }
  return cfg;
}

AbstractRunConfig abstract_config_from(const KeyValueConfig& kv) {
  const Eigen::MatrixXd A = read_matrix(kv.get_path("A"));
  const Eigen::VectorXd B = as_vector(read_matrix(kv.get_path("B")), "B");
  const Eigen::RowVectorXd C = as_vector(read_matrix(kv.get_path("C")), "C").transpose();
  const Eigen::MatrixXd P = read_matrix(kv.get_path("P"));

  AbstractRunConfig cfg{[&] {
                          try {
                            return AbstractSystem(A, B, C, P);
                          } catch (const std::invalid_argument& e) {
                            throw ConfigError(fmt::format("{}: {}", kv.source(), e.what()));
                          }
                        }(),
                        std::nullopt, Nonlinearity::saturation(0.2), std::nullopt, IntegratorConfig{},
                        1000};

  if (kv.has("mu")) cfg.mu = kv.get_double("mu");
  cfg.psi = psi_from(kv);
  if (kv.has("x0")) {
    const std::vector<double> x0 = kv.get_list("x0");
    if (static_cast<Eigen::Index>(x0.size()) != cfg.sys.dim()) {
      throw ConfigError(fmt::format("{}: x0 has {} entries, system dimension is {}", kv.source(),
                                    x0.size(), cfg.sys.dim()));
    }
    ExtendedState xi = ExtendedState::zero(cfg.sys.dim());
    xi.x = Eigen::Map<const Eigen::VectorXd>(x0.data(), cfg.sys.dim());
    xi.z = kv.get_double("z0", 0.0);
    cfg.xi0 = xi;
  } else if (kv.has("z0")) {
    throw ConfigError(fmt::format("{}: z0 given without x0", kv.source()));
  }
  cfg.integ.dt = kv.get_double("dt", cfg.integ.dt);
  cfg.integ.t_end = kv.get_double("t_end", cfg.integ.t_end);
  cfg.integ.record_stride = kv.get_int("record_stride", cfg.integ.record_stride);
  try {
    cfg.integ.scheme = parse_scheme(kv.get_string("scheme", "rk4"));
    cfg.integ.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", kv.source(), e.what()));
  }
  cfg.probe_samples = kv.get_int("probe.samples", cfg.probe_samples);
  if (cfg.probe_samples < 1) throw ConfigError("probe.samples must be >= 1");
  kv.ensure_all_used();
  return cfg;
}

}  // namespace satint
