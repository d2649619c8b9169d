#pragma once

#include <mutex>
#include <vector>

#include "hexband/green.hpp"
#include "hexband/materials.hpp"
#include "hexband/mesh.hpp"

namespace hexband {

enum class OperatorKind { SingleLayer, NpAdjoint, BlockA };

struct OperatorMatrix {
  Eigen::MatrixXcd m;
  Vec2 alpha = Vec2::Zero();
  double omega = 0.0;
  OperatorKind kind = OperatorKind::SingleLayer;
};

// Dense Nystroem matrices over the mesh nodes. Same-circle blocks combine the
// Kress/Martensen-Kussmaul rule for the log(4 sin^2((t-tau)/2)) part with the
// trapezoid rule on the smooth remainder; cross-circle blocks are plain
// trapezoid. Kernel evaluations are shared between pairs of circles related by
// conjugation parity, and the Laplace tables are reused across omega so that
// dispersion scans only re-sum the Kummer correction.
class LayerAssembler {
 public:
  LayerAssembler(const BoundaryMesh& mesh, const LatticeGreen& green, const Vec2& alpha);

  OperatorMatrix single_layer(double omega) const;
  OperatorMatrix np_adjoint(double omega) const;
  // [[ S^{a,kb}, -S^{a,k0} ], [ -I/2 + K*^{a,kb}, -delta (I/2 + K*^{a,k0}) ]]
  OperatorMatrix block_a(double omega, const MaterialParams& mat) const;

  const BoundaryMesh& mesh() const { return *mesh_; }
  const Vec2& alpha() const { return alpha_; }

 private:
  struct Table {
    // same-circle smooth remainder R^a (+ Kummer) at r(e_i - e_k), row-major
    std::vector<GreensEval> same;
    // full kernel tables per unordered circle pair, in pair_ order
    std::vector<std::vector<GreensEval>> cross;
  };
  template <typename FSame, typename FCross>
  Table build_table(FSame&& same_eval, FCross&& cross_eval) const;
  void ensure_power_tables() const;
  Table kummer_table(double omega) const;
  void assemble(const Table* kummer, Eigen::MatrixXcd* single, Eigen::MatrixXcd* np) const;

  const BoundaryMesh* mesh_;
  const LatticeGreen* green_;
  Vec2 alpha_;
  std::vector<std::pair<int, int>> pairs_;  // c < c'
  std::vector<double> kress_;               // circular log-quadrature weights
  Table laplace_;
  // omega-independent Kummer pieces, built on first omega != 0 assembly
  mutable std::once_flag power_once_;
  mutable Table t2_, t4_;
};

OperatorMatrix assemble_single_layer(const BoundaryMesh& mesh, const LatticeGreen& green,
                                     const Vec2& alpha, double omega);
OperatorMatrix assemble_np_adjoint(const BoundaryMesh& mesh, const LatticeGreen& green,
                                   const Vec2& alpha, double omega);
OperatorMatrix assemble_block_a(const BoundaryMesh& mesh, const LatticeGreen& green,
                                const Vec2& alpha, double omega, const MaterialParams& mat);

struct AugmentedSolution {
  Density density;
  Complex offset{0.0, 0.0};
};

// Solves S[phi] = rhs + c * chi_dD subject to int phi = 0; unique for the
// periodic Laplace single layer. The returned offset c is the recovered
// constant (-1/6 when rhs is one circle indicator of the 6-disk boundary).
// Throws when the augmented matrix is ill-conditioned (rcond < 1e-12).
AugmentedSolution solve_augmented(const OperatorMatrix& single_layer, const Density& rhs,
                                  const BoundaryMesh& mesh);

// Plain solve S[phi] = rhs for invertible quasi-periodic single layers.
Density solve_plain(const OperatorMatrix& single_layer, const Density& rhs);

// S^{a,w}[d](x) off the boundary by trapezoid quadrature. When near is given,
// it is set if x lies closer to dD than twice the node spacing.
Complex evaluate_potential(const Density& d, const BoundaryMesh& mesh,
                           const LatticeGreen& green, const Vec2& x, const Vec2& alpha,
                           double omega, bool* near = nullptr);
CVec2 evaluate_potential_gradient(const Density& d, const BoundaryMesh& mesh,
                                  const LatticeGreen& green, const Vec2& x,
                                  const Vec2& alpha, double omega);

struct NpKernelReport {
  int dimension = 0;           // singular values below tol * ||B||
  double gap_ratio = 0.0;      // 6th-smallest / 5th-smallest singular value
  std::vector<double> smallest;  // ascending, first 8
  // per kernel vector: single-layer trace constant on each circle, their sum,
  // the deviation of the trace from circle-wise constancy, and int psi.
  std::vector<std::vector<double>> traces;
  std::vector<double> trace_sums;
  std::vector<double> trace_deviation;
  std::vector<double> density_means;
};

NpKernelReport np_kernel_dimension(const BoundaryMesh& mesh, const LatticeGreen& green,
                                   double tol);

}  // namespace hexband
