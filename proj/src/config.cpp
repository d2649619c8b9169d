#include "hexband/config.hpp"

#include <cfloat>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hexband {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("config parse error at line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void validate_fail(const std::string& field, const std::string& bound) {
  throw std::runtime_error("config validation error: " + field + " " + bound);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) parse_fail(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    parse_fail(line, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line, "number out of range: '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  const double d = to_double(v, line);
  const int i = static_cast<int>(d);
  if (double(i) != d) parse_fail(line, "expected an integer, got '" + v + "'");
  return i;
}

bool to_bool(const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  parse_fail(line, "expected true/false, got '" + v + "'");
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) parse_fail(lineno, "empty key");

    if (section == "geometry") {
      if (key == "radius") cfg.geometry.radius = to_double(value, lineno);
      else if (key == "sigma") cfg.geometry.sigma = to_double(value, lineno);
      else parse_fail(lineno, "unknown key geometry." + key);
    } else if (section == "materials") {
      if (key == "rho0") cfg.materials.rho0 = to_double(value, lineno);
      else if (key == "kappa0") cfg.materials.kappa0 = to_double(value, lineno);
      else if (key == "rho1") cfg.materials.rho1 = to_double(value, lineno);
      else if (key == "kappa1") cfg.materials.kappa1 = to_double(value, lineno);
      else parse_fail(lineno, "unknown key materials." + key);
    } else if (section == "discretization") {
      if (key == "nodes_per_circle") cfg.discretization.nodes_per_circle = to_int(value, lineno);
      else if (key == "ewald_split") cfg.discretization.ewald_split = to_double(value, lineno);
      else if (key == "lattice_tol") cfg.discretization.lattice_tol = to_double(value, lineno);
      else if (key == "grid_points") cfg.discretization.grid_points = to_int(value, lineno);
      else if (key == "oracle_spacing") cfg.discretization.oracle_spacing = to_double(value, lineno);
      else parse_fail(lineno, "unknown key discretization." + key);
    } else if (section == "path") {
      if (key == "points") cfg.path.points = value;
      else if (key == "samples") cfg.path.samples = to_int(value, lineno);
      else parse_fail(lineno, "unknown key path." + key);
    } else if (section == "cone") {
      if (key == "t_min_frac") cfg.cone.t_min_frac = to_double(value, lineno);
      else if (key == "t_max_frac") cfg.cone.t_max_frac = to_double(value, lineno);
      else if (key == "directions") cfg.cone.directions = to_int(value, lineno);
      else if (key == "radii") cfg.cone.radii = to_int(value, lineno);
      else if (key == "subcell") cfg.cone.subcell = to_bool(value, lineno);
      else parse_fail(lineno, "unknown key cone." + key);
    } else if (section == "gap") {
      if (key == "radius_frac") cfg.gap.radius_frac = to_double(value, lineno);
      else if (key == "directions") cfg.gap.directions = to_int(value, lineno);
      else if (key == "radii") cfg.gap.radii = to_int(value, lineno);
      else parse_fail(lineno, "unknown key gap." + key);
    } else if (section == "fold") {
      if (key == "epsilon_frac") cfg.fold.epsilon_frac = to_double(value, lineno);
      else if (key == "omega") cfg.fold.omega = to_double(value, lineno);
      else if (key == "probes") cfg.fold.probes = to_int(value, lineno);
      else parse_fail(lineno, "unknown key fold." + key);
    } else if (section == "dispersion") {
      if (key == "omega_lo") cfg.dispersion.omega_lo = to_double(value, lineno);
      else if (key == "omega_hi") cfg.dispersion.omega_hi = to_double(value, lineno);
      else if (key == "grid_points") cfg.dispersion.grid_points = to_int(value, lineno);
      else if (key == "threshold") cfg.dispersion.threshold = to_double(value, lineno);
      else if (key == "nodes_per_circle") cfg.dispersion.nodes_per_circle = to_int(value, lineno);
      else if (key == "alphas") cfg.dispersion.alphas = value;
      else parse_fail(lineno, "unknown key dispersion." + key);
    } else if (section.empty()) {
      parse_fail(lineno, "key outside any [section]");
    } else {
      parse_fail(lineno, "unknown section [" + section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void ExperimentConfig::validate() const {
  if (!(geometry.radius > 0.0) || geometry.radius >= 0.125)
    validate_fail("geometry.radius", "must lie in (0, 1/8)");
  if (std::abs(geometry.sigma) >= 0.5)
    validate_fail("geometry.sigma", "must lie in (-0.5, 0.5)");
  materials.validate();
  if (discretization.nodes_per_circle < 8 || discretization.nodes_per_circle % 2 != 0)
    validate_fail("discretization.nodes_per_circle", "must be even and >= 8");
  if (discretization.ewald_split < 0.0)
    validate_fail("discretization.ewald_split", "must be >= 0");
  if (!(discretization.lattice_tol > 0.0))
    validate_fail("discretization.lattice_tol", "must be > 0");
  if (discretization.grid_points < 11 || discretization.grid_points % 2 == 0)
    validate_fail("discretization.grid_points", "must be odd and >= 11");
  if (discretization.oracle_spacing < 0.0)
    validate_fail("discretization.oracle_spacing", "must be >= 0");
  if (path.samples < 2) validate_fail("path.samples", "must be >= 2");
  if (!(0.0 < cone.t_min_frac && cone.t_min_frac < cone.t_max_frac && cone.t_max_frac <= 0.1))
    validate_fail("cone.t_min_frac/t_max_frac", "need 0 < t_min < t_max <= 0.1");
  if (cone.directions < 3) validate_fail("cone.directions", "must be >= 3");
  if (cone.radii < 2) validate_fail("cone.radii", "must be >= 2");
  if (!(0.0 < gap.radius_frac && gap.radius_frac <= 0.5))
    validate_fail("gap.radius_frac", "must lie in (0, 0.5]");
  if (gap.directions < 1 || gap.radii < 2) validate_fail("gap.directions/radii", "too few");
  if (fold.probes < 1) validate_fail("fold.probes", "must be >= 1");
  if (fold.omega < 0.0) validate_fail("fold.omega", "must be >= 0");
  if (dispersion.grid_points < 8) validate_fail("dispersion.grid_points", "must be >= 8");
  if (!(dispersion.threshold > 0.0)) validate_fail("dispersion.threshold", "must be > 0");
  if (dispersion.nodes_per_circle != 0 &&
      (dispersion.nodes_per_circle < 8 || dispersion.nodes_per_circle % 2 != 0))
    validate_fail("dispersion.nodes_per_circle", "must be 0 or even and >= 8");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  return {
      {"geometry.radius", fmt(geometry.radius)},
      {"geometry.sigma", fmt(geometry.sigma)},
      {"materials.rho0", fmt(materials.rho0)},
      {"materials.kappa0", fmt(materials.kappa0)},
      {"materials.rho1", fmt(materials.rho1)},
      {"materials.kappa1", fmt(materials.kappa1)},
      {"discretization.nodes_per_circle", std::to_string(discretization.nodes_per_circle)},
      {"discretization.ewald_split", fmt(discretization.ewald_split)},
      {"discretization.lattice_tol", fmt(discretization.lattice_tol)},
      {"discretization.grid_points", std::to_string(discretization.grid_points)},
      {"discretization.oracle_spacing", fmt(discretization.oracle_spacing)},
      {"path.points", path.points},
      {"path.samples", std::to_string(path.samples)},
      {"cone.t_min_frac", fmt(cone.t_min_frac)},
      {"cone.t_max_frac", fmt(cone.t_max_frac)},
      {"cone.directions", std::to_string(cone.directions)},
      {"cone.radii", std::to_string(cone.radii)},
      {"cone.subcell", cone.subcell ? "true" : "false"},
      {"gap.radius_frac", fmt(gap.radius_frac)},
      {"gap.directions", std::to_string(gap.directions)},
      {"gap.radii", std::to_string(gap.radii)},
      {"fold.epsilon_frac", fmt(fold.epsilon_frac)},
      {"fold.omega", fmt(fold.omega)},
      {"fold.probes", std::to_string(fold.probes)},
      {"dispersion.omega_lo", fmt(dispersion.omega_lo)},
      {"dispersion.omega_hi", fmt(dispersion.omega_hi)},
      {"dispersion.grid_points", std::to_string(dispersion.grid_points)},
      {"dispersion.threshold", fmt(dispersion.threshold)},
      {"dispersion.nodes_per_circle", std::to_string(dispersion.nodes_per_circle)},
      {"dispersion.alphas", dispersion.alphas},
  };
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : echo()) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hexband
