#pragma once

#include <string>
#include <vector>

#include "hexband/types.hpp"

namespace hexband {

// Direct and dual basis of a 2D lattice, k_i . l_j = 2*pi*delta_ij.
struct LatticeBasis {
  Vec2 l1, l2;
  Vec2 k1, k2;
  double cell_area = 0.0;

  Vec2 lattice_point(int n1, int n2) const { return double(n1) * l1 + double(n2) * l2; }
  Vec2 dual_point(int n1, int n2) const { return double(n1) * k1 + double(n2) * k2; }
  // Coordinates (s,t) with x = s*l1 + t*l2; inverse comes free from duality.
  Vec2 fractional(const Vec2& x) const {
    return Vec2(k1.dot(x), k2.dot(x)) / (2.0 * kPi);
  }
};

// Hexagonal lattice with l1 = (1/2, -sqrt(3)/2), l2 = (1/2, sqrt(3)/2).
LatticeBasis hex_lattice();

// Sub-lattice of the super honeycomb case: lt1 = (2 l1 + l2)/3, lt2 = (l1 + 2 l2)/3,
// dual kt1 = 2 k1 - k2, kt2 = 2 k2 - k1. Cell area shrinks by 3.
LatticeBasis sublattice(const LatticeBasis& basis);

struct HighSymmetryPoints {
  Vec2 gamma;   // 0
  Vec2 alpha1;  // = k1
  Vec2 alpha2;  // = k2
  Vec2 m1;      // -(k1+k2)/2
  Vec2 m2;      // +(k1+k2)/2
};
HighSymmetryPoints high_symmetry_points(const LatticeBasis& basis);

// Point symmetries of the crystal.
Mat2 rotation_minus_60();  // R, the -pi/3 rotation
Mat2 reflection_x();       // T_x
Mat2 reflection_y();       // T_y
Mat2 inversion();

enum class CellVariant { FullCell, SubCell };

// Six disks of equal radius on the rays R^{j-1} * (-(1+sigma) l1 / 3), or the
// two-disk sub-cell variant used for band folding.
struct InclusionLayout {
  double radius = 0.0;
  double sigma = 0.0;
  CellVariant variant = CellVariant::FullCell;
  std::vector<Vec2> centers;

  int count() const { return static_cast<int>(centers.size()); }
  double area() const;  // total inclusion area in the cell
  // "contracted" for sigma < 0, "super" at 0, "dilated" for sigma > 0
  std::string deformation_label() const;
};

// Throws std::invalid_argument when radius >= 1/8, when disks overlap each
// other or their lattice images, or when a disk leaves the unit cell.
InclusionLayout build_inclusions(double radius, double sigma,
                                 CellVariant variant = CellVariant::FullCell);

// min over lattice translations n of |p + n - q|; a 5x5 block of translations
// suffices for points within one cell.
double min_image_distance(const Vec2& p, const Vec2& q, const LatticeBasis& basis);

}  // namespace hexband
