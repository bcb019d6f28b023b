// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kinetic/harness.hpp"

namespace kin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_num(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || trim(end) != "")
    throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  return v;
}

Vec vec_from(int d, const std::string& key, const std::vector<double>& xs) {
  if (int(xs.size()) != d)
    throw ConfigError("config key '" + key + "': expected " +
                      std::to_string(d) + " components");
  return make_vec(d, xs[0], xs[1], d == 3 ? xs[2] : 0.0);
}

Vec get_vec(const KeyValueConfig& kv, const std::string& key, int d,
            double fallback_component) {
  std::vector<double> fb(std::size_t(d), fallback_component);
  return vec_from(d, key, kv.get_list(key, fb));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv.entries[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str());
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries.count(key) != 0;
}

std::string KeyValueConfig::get_str(const std::string& key,
                                    const std::string& fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_str(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw ConfigError("config: missing required key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_num(const std::string& key, double fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : parse_num(key, it->second);
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t fallback) const {
  const double v = get_num(key, double(fallback));
  const auto i = std::int64_t(v);
  if (double(i) != v)
    throw ConfigError("config key '" + key + "': expected an integer");
  return i;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
  auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': expected an unsigned integer");
  return v;
}

std::vector<double> KeyValueConfig::get_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  std::vector<double> xs;
  std::istringstream is(it->second);
  std::string tok;
  while (is >> tok) xs.push_back(parse_num(key, tok));
  if (xs.empty())
    throw ConfigError("config key '" + key + "': empty list");
  return xs;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig c;
  const int d = int(kv.get_int("d", 2));
  const double eps = kv.get_num("eps", 1e-3);
  const double beta = kv.get_num("beta", 1.0);
  try {
    c.params = ModelParams::make(d, eps, beta);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  c.t_end = kv.get_num("t_end", 1.0);
  c.ensemble = int(kv.get_int("ensemble", 1));
  c.base_seed = kv.get_u64("seed", 1);
  c.out_dir = kv.get_str("out", ".");
  c.time_samples = kv.get_list("times", {1.0});

  const std::string kind = kv.get_str("initial.kind", "uniform");
  if (kind == "uniform")
    c.initial.kind = InitialKind::UniformBoxXMaxwellianV;
  else if (kind == "gaussian")
    c.initial.kind = InitialKind::GaussianXMaxwellianV;
  else if (kind == "two-bump")
    c.initial.kind = InitialKind::TwoBumpV;
  else if (kind == "bump")
    c.initial.kind = InitialKind::BumpXMaxwellianV;
  else
    throw ConfigError("config key 'initial.kind': unknown kind '" + kind +
                      "' (uniform | gaussian | two-bump | bump)");
  c.initial.box_lo = get_vec(kv, "initial.box_lo", d, -1.0);
  c.initial.box_hi = get_vec(kv, "initial.box_hi", d, 1.0);
  c.initial.gauss_center = get_vec(kv, "initial.center", d, 0.0);
  c.initial.gauss_sigma = kv.get_num("initial.sigma", 1.0);
  c.initial.bump_radius = kv.get_num("initial.radius", 1.0);
  c.initial.beta = kv.get_num("initial.beta", beta);
  if (c.initial.kind == InitialKind::TwoBumpV) {
    for (const char* key : {"initial.bump1", "initial.bump2"}) {
      const auto xs = kv.get_list(key, {});
      if (int(xs.size()) != d + 2)
        throw ConfigError(std::string("config key '") + key + "': expected " +
                          std::to_string(d + 2) +
                          " numbers (center, beta, weight)");
      VelocityBump b;
      b.center = make_vec(d, xs[0], xs[1], d == 3 ? xs[2] : 0.0);
      b.beta = xs[std::size_t(d)];
      b.weight = xs[std::size_t(d) + 1];
      c.initial.bumps.push_back(b);
    }
  }

  c.binning.d = d;
  c.binning.x_lo = get_vec(kv, "bin.x_lo", d, -1.0);
  c.binning.x_hi = get_vec(kv, "bin.x_hi", d, 1.0);
  c.binning.nx = int(kv.get_int("bin.nx", 1));
  c.binning.v_lo = get_vec(kv, "bin.v_lo", d, -6.0);
  c.binning.v_hi = get_vec(kv, "bin.v_hi", d, 6.0);
  c.binning.nv = int(kv.get_int("bin.nv", 6));

  c.binning_pair = c.binning;
  c.binning_pair.nx = int(kv.get_int("pair.nx", 1));
  c.binning_pair.nv = int(kv.get_int("pair.nv", 3));

  c.solver.n_v = int(kv.get_int("solver.n_v", 24));
  c.solver.v_max = kv.get_num("solver.v_max", 6.0);
  c.solver.n_x = int(kv.get_int("solver.n_x", 0));
  c.solver.dt = kv.get_num("solver.dt", 0.02);
  c.solver.n_omega = int(kv.get_int("solver.n_omega", 16));

  c.windows.short_window = kv.get_num("graph.short_window", 0.2);
  c.windows.long_window = kv.get_num("graph.long_window", 2.0);

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  initial.validate(params.d);
  binning.validate();
  binning_pair.validate();
  if (ensemble < 1) throw ConfigError("config: ensemble must be >= 1");
  if (!(t_end > 0.0)) throw ConfigError("config: t_end must be positive");
  if (time_samples.empty())
    throw ConfigError("config: at least one sample time required");
  for (std::size_t i = 0; i < time_samples.size(); ++i) {
    if (!(time_samples[i] > 0.0) || time_samples[i] > t_end + 1e-12)
      throw ConfigError("config: sample times must lie in (0, t_end]");
    if (i > 0 && !(time_samples[i] > time_samples[i - 1]))
      throw ConfigError("config: sample times must be strictly increasing");
  }
  if (solver.n_v < 8) throw ConfigError("config: solver.n_v must be >= 8");
  if (!(solver.v_max > 0.0))
    throw ConfigError("config: solver.v_max must be positive");
  if (!(solver.dt > 0.0)) throw ConfigError("config: solver.dt must be positive");
  if (solver.n_omega < 2 || solver.n_omega % 2 != 0)
    throw ConfigError("config: solver.n_omega must be even and >= 2");
  if (!(windows.short_window > 0.0) || !(windows.long_window > 0.0))
    throw ConfigError("config: graph windows must be positive");
}

VelocityGrid ExperimentConfig::velocity_grid() const {
  VelocityGrid g;
  g.d = params.d;
  g.n = solver.n_v;
  g.v_max = solver.v_max;
  g.validate();
  return g;
}

SpatialGrid ExperimentConfig::spatial_grid() const {
  SpatialGrid s;
  s.d = params.d;
  s.lo = binning.x_lo;
  s.hi = binning.x_hi;
  s.n = solver.n_x > 0 ? solver.n_x : binning.nx;
  return s;
}

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(int d, const Vec& v) {
  std::string s = fmt_num(v[0]) + " " + fmt_num(v[1]);
  if (d == 3) s += " " + fmt_num(v[2]);
  return s;
}

}  // namespace

std::string to_config_text(const ExperimentConfig& c) {
  const int d = c.params.d;
  std::ostringstream os;
  os << "d = " << d << "\n";
  os << "eps = " << fmt_num(c.params.eps) << "\n";
  os << "beta = " << fmt_num(c.params.beta) << "\n";
  os << "t_end = " << fmt_num(c.t_end) << "\n";
  os << "ensemble = " << c.ensemble << "\n";
  os << "seed = " << c.base_seed << "\n";
  os << "out = " << c.out_dir << "\n";
  os << "times =";
  for (double t : c.time_samples) os << " " << fmt_num(t);
  os << "\n";
  switch (c.initial.kind) {
    case InitialKind::UniformBoxXMaxwellianV:
      os << "initial.kind = uniform\n";
      break;
    case InitialKind::GaussianXMaxwellianV:
      os << "initial.kind = gaussian\n";
      break;
    case InitialKind::TwoBumpV:
      os << "initial.kind = two-bump\n";
      break;
    case InitialKind::BumpXMaxwellianV:
      os << "initial.kind = bump\n";
      break;
  }
  os << "initial.box_lo = " << fmt_vec(d, c.initial.box_lo) << "\n";
  os << "initial.box_hi = " << fmt_vec(d, c.initial.box_hi) << "\n";
  os << "initial.center = " << fmt_vec(d, c.initial.gauss_center) << "\n";
  os << "initial.sigma = " << fmt_num(c.initial.gauss_sigma) << "\n";
  os << "initial.radius = " << fmt_num(c.initial.bump_radius) << "\n";
  os << "initial.beta = " << fmt_num(c.initial.beta) << "\n";
  for (std::size_t b = 0; b < c.initial.bumps.size() && b < 2; ++b) {
    const auto& bump = c.initial.bumps[b];
    os << "initial.bump" << (b + 1) << " = " << fmt_vec(d, bump.center) << " "
       << fmt_num(bump.beta) << " " << fmt_num(bump.weight) << "\n";
  }
  os << "bin.x_lo = " << fmt_vec(d, c.binning.x_lo) << "\n";
  os << "bin.x_hi = " << fmt_vec(d, c.binning.x_hi) << "\n";
  os << "bin.nx = " << c.binning.nx << "\n";
  os << "bin.v_lo = " << fmt_vec(d, c.binning.v_lo) << "\n";
  os << "bin.v_hi = " << fmt_vec(d, c.binning.v_hi) << "\n";
  os << "bin.nv = " << c.binning.nv << "\n";
  os << "pair.nx = " << c.binning_pair.nx << "\n";
  os << "pair.nv = " << c.binning_pair.nv << "\n";
  os << "solver.n_v = " << c.solver.n_v << "\n";
  os << "solver.v_max = " << fmt_num(c.solver.v_max) << "\n";
  os << "solver.n_x = " << c.solver.n_x << "\n";
  os << "solver.dt = " << fmt_num(c.solver.dt) << "\n";
  os << "solver.n_omega = " << c.solver.n_omega << "\n";
  os << "graph.short_window = " << fmt_num(c.windows.short_window) << "\n";
  os << "graph.long_window = " << fmt_num(c.windows.long_window) << "\n";
  return os.str();
}

std::string config_keys() {
  return
      "d                  2        spatial dimension (2 or 3)\n"
      "eps                1e-3     sphere diameter\n"
      "beta               1.0      reference inverse temperature\n"
      "t_end              1.0      simulated time span\n"
      "ensemble           1        ensemble size M\n"
      "seed               1        base seed; member streams are (seed, id)\n"
      "out                .        output directory\n"
      "times              1.0      sample times, increasing, within (0, t_end]\n"
      "initial.kind       uniform  uniform | gaussian | two-bump | bump\n"
      "initial.box_lo     -1 -1    spatial box (uniform/two-bump kinds)\n"
      "initial.box_hi     1 1\n"
      "initial.center     0 0      spatial center (gaussian/bump kinds)\n"
      "initial.sigma      1.0      spatial Gaussian width\n"
      "initial.radius     1.0      bump kind: compact support radius\n"
      "initial.beta       beta     Maxwellian inverse temperature\n"
      "initial.bump1      (none)   two-bump: center..., beta, weight\n"
      "initial.bump2      (none)\n"
      "bin.x_lo           -1 -1    estimator binning, spatial box\n"
      "bin.x_hi           1 1\n"
      "bin.nx             1        spatial cells per axis\n"
      "bin.v_lo           -6 -6    estimator binning, velocity box\n"
      "bin.v_hi           6 6\n"
      "bin.nv             6        velocity cells per axis\n"
      "pair.nx            1        coarse binning for cumulants\n"
      "pair.nv            3\n"
      "solver.n_v         24       solver velocity nodes per axis\n"
      "solver.v_max       6.0      solver velocity box half-width\n"
      "solver.n_x         bin.nx   solver spatial cells per axis\n"
      "solver.dt          0.02     solver time step\n"
      "solver.n_omega     16       angular quadrature nodes (d = 2)\n"
      "graph.short_window 0.2      recollision statistics window\n"
      "graph.long_window  2.0      giant-component window\n";
}

}  // namespace kin
