#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexband/capacitance.hpp"

namespace hexband {

// Complex field sampled on an inversion-symmetric rectangular grid covering
// the hexagonal cell. Points inside an inclusion carry its constant interior
// trace; points within the quadrature standoff of a boundary are flagged.
struct FieldGrid {
  int nx = 0, ny = 0;
  double x_half = 0.0, y_half = 0.0;  // grid spans [-x_half, x_half] x [-y_half, y_half]
  std::vector<Complex> values;        // row-major, j * nx + i
  std::vector<std::uint8_t> mask;     // 0 exterior, 1 inside inclusion, 2 near boundary

  Vec2 point(int i, int j) const {
    return Vec2(-x_half + 2.0 * x_half * i / (nx - 1), -y_half + 2.0 * y_half * j / (ny - 1));
  }
};

// w = sum_j v_j S^{0,0}[phi_j] on the grid; densities come from
// periodic_capacitance on the same mesh.
FieldGrid synthesize_eigenfunction(const Eigen::VectorXcd& v,
                                   const std::vector<Density>& densities,
                                   const BoundaryMesh& mesh, const LatticeGreen& green,
                                   int grid_points = 101, int threads = 1);

struct ParityReport {
  double even_score = 0.0;  // ||f_even|| / ||f||
  double odd_score = 0.0;   // ||f_odd|| / ||f||
  std::string verdict;      // "even", "odd", or "mixed" at the 0.99 threshold
};

ParityReport parity_classify(const FieldGrid& f);

// Principal angles between the computed eigenvector pairs and the reference
// spans (1,1,0,-1,-1,0),(1,2,1,-1,-2,-1) and (1,-1,0,1,-1,0),(1,-2,1,1,-2,1).
// For sigma < 0 the first span belongs to bands 2-3, for sigma > 0 to 4-5.
struct SpanCheck {
  double angle_23 = 0.0;  // max principal angle, radians
  double angle_45 = 0.0;
};

SpanCheck eigenvector_span_check(const EigenDecomposition& eig, double sigma);

// The two reference spans themselves.
Eigen::MatrixXd parity_reference_span(bool inversion_odd);

}  // namespace hexband
