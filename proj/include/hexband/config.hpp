#pragma once

#include <string>
#include <vector>

#include "hexband/materials.hpp"
#include "hexband/types.hpp"

namespace hexband {

// Experiment configuration, loaded from a flat-sectioned key = value file
// (TOML-compatible subset). Defaults reproduce the reference setup: six
// circles of radius 0.086, rho0 = kappa0 = 1, rho1 = 1/50, kappa1 = 50.
struct ExperimentConfig {
  struct Geometry {
    double radius = 0.086;
    double sigma = 0.0;
  } geometry;

  MaterialParams materials;

  struct Discretization {
    int nodes_per_circle = 64;
    double ewald_split = 0.0;  // 0 = automatic
    double lattice_tol = 1e-12;
    int grid_points = 101;     // field sampling grid
    double oracle_spacing = 0.0;  // energy oracle h; 0 = radius / 12
  } discretization;

  struct Path {
    std::string points = "M1,G,M2";
    int samples = 81;
  } path;

  struct Cone {
    double t_min_frac = 0.01;  // in units of |k1|
    double t_max_frac = 0.05;
    int directions = 6;
    int radii = 6;
    bool subcell = false;
  } cone;

  struct Gap {
    double radius_frac = 0.2;
    int directions = 8;
    int radii = 6;
  } gap;

  struct Fold {
    double epsilon_frac = 0.05;  // epsilon = frac * k1
    double omega = 0.0;
    int probes = 10;
  } fold;

  struct Dispersion {
    double omega_lo = 0.0;  // 0 = derive the window from the asymptotic bands
    double omega_hi = 0.0;
    int grid_points = 200;
    double threshold = 1e-6;
    int nodes_per_circle = 32;
    std::string alphas = "0.30,0.10;0.45,0.00;0.20,0.35";  // fractions of (k1, k2)
  } dispersion;

  // Echo of every field in canonical order, used for hashing and headers.
  std::vector<std::pair<std::string, std::string>> echo() const;
  std::string hash() const;  // FNV-1a 64 over the echo
  void validate() const;     // module preconditions, throws on violation
};

// Parse errors carry the 1-based line number; validation errors name the field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

}  // namespace hexband
