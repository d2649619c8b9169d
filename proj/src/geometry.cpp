#include "hexband/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace hexband {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

LatticeBasis hex_lattice() {
  LatticeBasis b;
  b.l1 = Vec2(0.5, -kSqrt3 / 2.0);
  b.l2 = Vec2(0.5, kSqrt3 / 2.0);
  // Solve k_i . l_j = 2 pi delta_ij: rows of 2*pi*[l1 l2]^{-T}.
  Mat2 a;
  a.col(0) = b.l1;
  a.col(1) = b.l2;
  Mat2 dual = 2.0 * kPi * a.inverse();
  b.k1 = dual.row(0);
  b.k2 = dual.row(1);
  b.cell_area = std::abs(a.determinant());
  return b;
}

LatticeBasis sublattice(const LatticeBasis& basis) {
  LatticeBasis s;
  s.l1 = (2.0 * basis.l1 + basis.l2) / 3.0;
  s.l2 = (basis.l1 + 2.0 * basis.l2) / 3.0;
  s.k1 = 2.0 * basis.k1 - basis.k2;
  s.k2 = 2.0 * basis.k2 - basis.k1;
  s.cell_area = basis.cell_area / 3.0;
  return s;
}

HighSymmetryPoints high_symmetry_points(const LatticeBasis& basis) {
  HighSymmetryPoints p;
  p.gamma = Vec2::Zero();
  p.alpha1 = basis.k1;
  p.alpha2 = basis.k2;
  p.m1 = -0.5 * (basis.k1 + basis.k2);
  p.m2 = 0.5 * (basis.k1 + basis.k2);
  return p;
}

Mat2 rotation_minus_60() {
  Mat2 r;
  r << 0.5, kSqrt3 / 2.0, -kSqrt3 / 2.0, 0.5;
  return r;
}

Mat2 reflection_x() {
  Mat2 t;
  t << 1.0, 0.0, 0.0, -1.0;
  return t;
}

Mat2 reflection_y() {
  Mat2 t;
  t << -1.0, 0.0, 0.0, 1.0;
  return t;
}

Mat2 inversion() { return -Mat2::Identity(); }

double InclusionLayout::area() const { return count() * kPi * radius * radius; }

std::string InclusionLayout::deformation_label() const {
  if (sigma < 0.0) return "contracted";
  if (sigma > 0.0) return "dilated";
  return "super";
}

InclusionLayout build_inclusions(double radius, double sigma, CellVariant variant) {
  if (!(radius > 0.0) || radius >= 0.125)
    throw std::invalid_argument("inclusion radius must lie in (0, 1/8)");
  if (variant == CellVariant::SubCell && sigma != 0.0)
    throw std::invalid_argument("sub-cell layout requires sigma = 0");

  const LatticeBasis basis = hex_lattice();
  InclusionLayout layout;
  layout.radius = radius;
  layout.sigma = sigma;
  layout.variant = variant;

  const Mat2 r = rotation_minus_60();
  Vec2 c = -(1.0 + sigma) / 3.0 * basis.l1;
  const int n = variant == CellVariant::FullCell ? 6 : 2;
  for (int j = 0; j < n; ++j) {
    layout.centers.push_back(c);
    c = r * c;
  }

  const LatticeBasis cell =
      variant == CellVariant::FullCell ? basis : sublattice(basis);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (min_image_distance(layout.centers[j], layout.centers[k], cell) <= 2.0 * radius)
        throw std::invalid_argument("inclusions overlap each other or a lattice image");
    }
  }
  // Keep D inside the unit cell (hexagon inradius 1/2). The sub-cell domain is
  // a shifted copy of the small hexagon, so only the image check above applies.
  if (variant == CellVariant::FullCell) {
    for (const Vec2& center : layout.centers) {
      if (center.norm() + radius >= 0.5)
        throw std::invalid_argument("inclusions are not strictly inside the unit cell");
    }
  }
  return layout;
}

double min_image_distance(const Vec2& p, const Vec2& q, const LatticeBasis& basis) {
  double best = std::numeric_limits<double>::infinity();
  for (int n1 = -2; n1 <= 2; ++n1)
    for (int n2 = -2; n2 <= 2; ++n2)
      best = std::min(best, (p + basis.lattice_point(n1, n2) - q).norm());
  return best;
}

}  // namespace hexband
