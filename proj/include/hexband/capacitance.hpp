#pragma once

#include <vector>

#include "hexband/layer_ops.hpp"

namespace hexband {

struct CapacitanceMatrix {
  Eigen::MatrixXcd c;  // m x m, Hermitian (real symmetric at alpha = 0)
  Vec2 alpha = Vec2::Zero();
  double sigma = 0.0;
  double radius = 0.0;
  int nodes_per_circle = 0;
  bool periodic = true;
  double anti_hermitian_residual = 0.0;  // ||C - C^H|| / ||C|| before symmetrization

  Eigen::MatrixXd real_part() const { return c.real(); }
};

struct CapacitanceSolution {
  CapacitanceMatrix matrix;
  std::vector<Density> densities;  // phi_{j,0}
  std::vector<Complex> offsets;    // recovered constants, -1/m each
};

// Periodic capacitance C_jk = -int_{dD_k} phi_j with S^{0,0}[phi_j] + c = chi_j,
// int phi_j = 0. Throws when a recovered offset strays from -1/m by more than
// 1e-6, which signals broken geometry or quadrature.
CapacitanceSolution periodic_capacitance(const BoundaryMesh& mesh, const LatticeGreen& green);

// Quasi-periodic extension via the plain solve S^{a,0}[phi_j] = chi_j,
// Hermitized as (C + C^H)/2 with the residual recorded. Rejects alpha closer
// to Gamma than 1e-4 |k1|; use periodic_capacitance there.
CapacitanceMatrix quasiperiodic_capacitance(const BoundaryMesh& mesh,
                                            const LatticeGreen& green, const Vec2& alpha);

struct EigenDecomposition {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // orthonormal columns
  double residual = 0.0;     // max_n ||C v - lambda v|| / ||C||
};

EigenDecomposition eigen_decomposition(const CapacitanceMatrix& cap);

// Structure checks of the periodic matrix: circulant symmetry, sub-symmetries,
// sign pattern, row sums, and the distance monotonicity of the couplings.
struct StructureReport {
  double symmetry_dev = 0.0;       // max |C - C^T|
  double imag_dev = 0.0;           // max |Im C|
  double circulant_dev = 0.0;      // max |C_jk - C[(k-j) mod m]|
  double row_sum_max = 0.0;
  double c13_minus_c15 = 0.0;
  double c12_minus_c16 = 0.0;
  double min_diagonal = 0.0;       // > 0 expected
  double max_offdiagonal = 0.0;    // < 0 expected
  double c13_minus_c12 = 0.0;      // > 0 expected (C12 < C13)
  double c13_minus_c14 = 0.0;      // > 0 expected (C14 < C13)
  double c12_minus_c14 = 0.0;      // 0 at sigma = 0
  bool sign_pattern_ok = false;
  bool monotonicity_ok = false;
};

StructureReport structure_report(const CapacitanceMatrix& cap);

// Independent oracle: periodic finite-difference Laplace solves on the
// triangulated cell with Dirichlet data delta_jk imposed where grid edges cut
// the circles, followed by the Dirichlet energy bilinear form. O(h) accurate.
// h is the physical grid spacing; requires radius / h >= 8.
CapacitanceMatrix energy_oracle(const InclusionLayout& layout, double h);

}  // namespace hexband
