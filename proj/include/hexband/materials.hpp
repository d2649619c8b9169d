#pragma once

#include <cmath>
#include <stdexcept>

namespace hexband {

// Densities and bulk moduli outside (0) and inside (1) the inclusions.
// delta = rho1/rho0 is the small contrast parameter of the asymptotics.
struct MaterialParams {
  double rho0 = 1.0;
  double kappa0 = 1.0;
  double rho1 = 0.02;
  double kappa1 = 50.0;

  double delta() const { return rho1 / rho0; }
  double v0() const { return std::sqrt(kappa0 / rho0); }
  double vb() const { return std::sqrt(kappa1 / rho1); }
  double k0(double omega) const { return omega / v0(); }
  double kb(double omega) const { return omega / vb(); }

  void validate() const {
    if (!(rho0 > 0.0 && kappa0 > 0.0 && rho1 > 0.0 && kappa1 > 0.0))
      throw std::invalid_argument("material parameters must be positive");
  }
  // The asymptotic band formulas assume delta well below 1.
  bool contrast_warning() const { return delta() >= 0.1; }
};

}  // namespace hexband
