#pragma once

#include "hexband/geometry.hpp"
#include "hexband/types.hpp"

namespace hexband {

struct LatticeSumParams {
  // Ewald splitting parameter eta; 0 selects sqrt(pi)/sqrt(cell_area).
  double ewald_split = 0.0;
  // Initial ring counts for the reciprocal and real-space sums. Rings are
  // grown automatically until the last ring contributes < abs_tol/10.
  int spectral_cutoff = 1;
  int spatial_cutoff = 1;
  double abs_tol = 1e-12;
};

struct GreensEval {
  Complex value{0.0, 0.0};
  CVec2 gradient = CVec2::Zero();
};

// Quasi-periodic Green's function of one lattice,
//
//   G^{a,w}(x) = (1/|Y|) sum_q exp(i(a+q).x) / (w^2 - |a+q|^2),
//
// with the q = 0 mode dropped when a = 0, w = 0. The Laplace part (w = 0) is
// evaluated by 2D Ewald summation: a Gaussian-screened reciprocal sum plus an
// exponential-integral image sum, which also yields the (1/2pi) log|x| split
// used by the Nystroem quadrature. The w != 0 part is the Kummer difference
// series with terms w^2 exp(i(a+q).x) / ((w^2-|a+q|^2) |a+q|^2); its slowly
// decaying |q|^-4 and |q|^-6 components are resummed by Ewald as well, leaving
// an |q|^-8 tail, so the cost stays flat across the subwavelength window.
//
// All evaluators are const and stateless; concurrent calls are safe.
class LatticeGreen {
 public:
  explicit LatticeGreen(const LatticeBasis& basis, LatticeSumParams params = {});

  const LatticeBasis& basis() const { return basis_; }
  double eta() const { return eta_; }
  double abs_tol() const { return params_.abs_tol; }

  // G^{a,0}(x), x not on the lattice.
  GreensEval laplace(const Vec2& x, const Vec2& alpha) const;

  // R^a(x) = G^{a,0}(x) - (1/2pi) log|x|, continuous at x = 0; |x| < 1/2 of
  // the lattice spacing.
  GreensEval laplace_regular(const Vec2& x, const Vec2& alpha) const;

  // G^{a,w}(x) - G^{a,0}(x) for subwavelength w. Equals
  // -w^2 power_sum(2) - w^4 power_sum(3) + helmholtz_tail.
  GreensEval helmholtz_correction(const Vec2& x, const Vec2& alpha, double omega) const;

  // (1/|Y|) sum exp(i beta.x)/|beta|^{2p} over beta = alpha + q != 0, p = 2, 3.
  // These are the omega-independent pieces of the Kummer resummation; callers
  // assembling many omegas at one alpha can cache them.
  GreensEval power_sum(const Vec2& x, const Vec2& alpha, int p) const;

  // (1/|Y|) [ w^6 sum exp(i beta.x)/((w^2-|beta|^2)|beta|^6) + (alpha = 0:
  // exp(0)/w^2 for the restored q = 0 mode) ].
  GreensEval helmholtz_tail(const Vec2& x, const Vec2& alpha, double omega) const;

  // Full kernel G^{a,w}; helmholtz(x, a, 0) == laplace(x, a).
  GreensEval helmholtz(const Vec2& x, const Vec2& alpha, double omega) const;

  // Literal truncation of the spectral series over shells |q| <= shell_count
  // shortest-dual-vector lengths, for validation only. The returned value is
  // averaged over trailing shells; *tail_estimate bounds the truncation error.
  Complex direct_sum(const Vec2& x, const Vec2& alpha, double omega, int shell_count,
                     double* tail_estimate = nullptr) const;

 private:
  struct Reduced {
    Vec2 x;
    Complex phase;  // exp(i alpha . (x_in - x))
  };
  Reduced reduce(const Vec2& x, const Vec2& alpha) const;
  GreensEval laplace_reduced(const Vec2& x, const Vec2& alpha, bool subtract_log) const;
  // Ewald sums of exp(i beta.x)/|beta|^{2p} for p = 2, 3 (beta = alpha + q).
  GreensEval inverse_power_sum(const Vec2& x, const Vec2& alpha, int p) const;
  GreensEval tail_reduced(const Vec2& x, const Vec2& alpha, double omega) const;

  LatticeBasis basis_;
  LatticeSumParams params_;
  double eta_;
  double min_dual_;  // shortest nonzero dual vector length
};

}  // namespace hexband
