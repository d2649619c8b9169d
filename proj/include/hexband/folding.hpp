#pragma once

#include <array>
#include <vector>

#include "hexband/capacitance.hpp"

namespace hexband {

// Partition of the dual lattice into the sub-lattice and its two shifted
// copies: q = n1 k1 + n2 k2 belongs to class (n1 - n2) mod 3, with exact
// integer coordinates (m1, m2) in the kt1, kt2 basis.
struct DualClass {
  int cls = 0;  // 0: sub-lattice, 1: k1 + sub-lattice, 2: k2 + sub-lattice
  int m1 = 0;
  int m2 = 0;
};

DualClass classify_dual(int n1, int n2);

// Splits a density on the 6-disk mesh into the three mutually orthogonal
// quasi-periodic components of types eps, k1 + eps, k2 + eps.
struct DensitySplit {
  std::array<Density, 3> parts;
};

DensitySplit decompose_density(const Density& phi, const BoundaryMesh& mesh,
                               const Vec2& epsilon);

// Restriction of one component to the two-disk sub-boundary D1 u D2.
Density restrict_to_subcell(const Density& component, const BoundaryMesh& mesh,
                            const BoundaryMesh& submesh);

// Max discrepancy over the probes between the full-cell single layer of phi
// and the sum of the three sub-cell single layers of its components. Requires
// the sigma = 0 layout; sub-lattice translation symmetry fails otherwise.
double verify_folding_identity(const Density& phi, const BoundaryMesh& mesh,
                               const LatticeGreen& green, const BoundaryMesh& submesh,
                               const LatticeGreen& subgreen, const Vec2& epsilon,
                               double omega, const std::vector<Vec2>& probes);

// Deterministic probe points at least `standoff` away from every circle.
std::vector<Vec2> folding_probes(const InclusionLayout& layout, int count,
                                 double standoff = 0.05);

struct FoldedSpectrumReport {
  Eigen::VectorXd full_spectrum;       // 6 eigenvalues of the full-cell C^0
  Eigen::VectorXd subcell_union;       // sorted union of the three sub-cell pairs
  double multiset_deviation = 0.0;     // max |full - union| / lambda_max
  double kpoint_pair_deviation = 0.0;  // sub-cell spectra at k1 vs k2
  double gamma_zero_eigenvalue = 0.0;  // lambda_1 of the sub-cell at 0
};

// Full-cell spectrum against the union of sub-cell spectra at {0, k1, k2}.
FoldedSpectrumReport folded_spectrum_check(double radius, int nodes_per_circle,
                                           const LatticeSumParams& params = {});

}  // namespace hexband
