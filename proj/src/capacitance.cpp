#include "hexband/capacitance.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace hexband {

CapacitanceSolution periodic_capacitance(const BoundaryMesh& mesh, const LatticeGreen& green) {
  const int m = mesh.circle_count();
  const OperatorMatrix s = assemble_single_layer(mesh, green, Vec2::Zero(), 0.0);

  CapacitanceSolution sol;
  sol.matrix.c.setZero(m, m);
  sol.matrix.alpha = Vec2::Zero();
  sol.matrix.sigma = mesh.layout.sigma;
  sol.matrix.radius = mesh.layout.radius;
  sol.matrix.nodes_per_circle = mesh.nodes_per_circle;
  sol.matrix.periodic = true;

  for (int j = 0; j < m; ++j) {
    AugmentedSolution aug = solve_augmented(s, indicator(j, mesh), mesh);
    if (std::abs(aug.offset + 1.0 / m) > 1e-6)
      throw std::runtime_error(
          "periodic_capacitance: recovered offset deviates from -1/m; geometry or "
          "quadrature is broken");
    for (int k = 0; k < m; ++k)
      sol.matrix.c(j, k) = -integrate(aug.density, mesh, {k});
    sol.offsets.push_back(aug.offset);
    sol.densities.push_back(std::move(aug.density));
  }

  const double norm = sol.matrix.c.norm();
  sol.matrix.anti_hermitian_residual =
      norm > 0 ? (sol.matrix.c - sol.matrix.c.adjoint()).norm() / norm : 0.0;
  return sol;
}

CapacitanceMatrix quasiperiodic_capacitance(const BoundaryMesh& mesh,
                                            const LatticeGreen& green, const Vec2& alpha) {
  const double k1 = green.basis().k1.norm();
  if (alpha.norm() < 1e-4 * k1)
    throw std::invalid_argument(
        "quasiperiodic_capacitance: alpha too close to Gamma, use periodic_capacitance");

  const int m = mesh.circle_count();
  const OperatorMatrix s = assemble_single_layer(mesh, green, alpha, 0.0);

  CapacitanceMatrix cap;
  cap.c.setZero(m, m);
  cap.alpha = alpha;
  cap.sigma = mesh.layout.sigma;
  cap.radius = mesh.layout.radius;
  cap.nodes_per_circle = mesh.nodes_per_circle;
  cap.periodic = false;

  for (int j = 0; j < m; ++j) {
    const Density phi = solve_plain(s, indicator(j, mesh));
    for (int k = 0; k < m; ++k) cap.c(j, k) = -integrate(phi, mesh, {k});
  }

  const double norm = cap.c.norm();
  cap.anti_hermitian_residual = norm > 0 ? (cap.c - cap.c.adjoint()).norm() / norm : 0.0;
  cap.c = 0.5 * (cap.c + cap.c.adjoint().eval());
  return cap;
}

EigenDecomposition eigen_decomposition(const CapacitanceMatrix& cap) {
  const Eigen::MatrixXcd h = 0.5 * (cap.c + cap.c.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen_decomposition failed to converge");

  EigenDecomposition eig;
  eig.values = es.eigenvalues();
  eig.vectors = es.eigenvectors();
  const double norm = cap.c.norm();
  for (int n = 0; n < eig.values.size(); ++n) {
    const double r = (cap.c * eig.vectors.col(n) - eig.values(n) * eig.vectors.col(n)).norm();
    eig.residual = std::max(eig.residual, norm > 0 ? r / norm : r);
  }
  return eig;
}

StructureReport structure_report(const CapacitanceMatrix& cap) {
  if (cap.c.rows() != 6)
    throw std::invalid_argument("structure_report expects the 6x6 periodic matrix");
  const Eigen::MatrixXd c = cap.real_part();
  const int m = 6;

  StructureReport rep;
  rep.imag_dev = cap.c.imag().cwiseAbs().maxCoeff();
  rep.symmetry_dev = (c - c.transpose()).cwiseAbs().maxCoeff();
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      rep.circulant_dev = std::max(rep.circulant_dev, std::abs(c(j, k) - c(0, (k - j + m) % m)));
  rep.row_sum_max = c.rowwise().sum().cwiseAbs().maxCoeff();
  rep.c13_minus_c15 = c(0, 2) - c(0, 4);
  rep.c12_minus_c16 = c(0, 1) - c(0, 5);
  rep.min_diagonal = c.diagonal().minCoeff();
  rep.max_offdiagonal = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      if (j != k) rep.max_offdiagonal = std::max(rep.max_offdiagonal, c(j, k));
  rep.c13_minus_c12 = c(0, 2) - c(0, 1);
  rep.c13_minus_c14 = c(0, 2) - c(0, 3);
  rep.c12_minus_c14 = c(0, 1) - c(0, 3);
  rep.sign_pattern_ok = rep.min_diagonal > 0.0 && rep.max_offdiagonal < 0.0;
  rep.monotonicity_ok = rep.c13_minus_c12 > 0.0 && rep.c13_minus_c14 > 0.0;
  return rep;
}

namespace {

struct OracleGrid {
  int m = 0;                      // nodes per lattice direction
  std::vector<int> disk_of;       // -1 outside, else disk index
  std::vector<int> active_index;  // compacted index of outside nodes
  int active_count = 0;
};

int wrap(int i, int m) { return ((i % m) + m) % m; }

}  // namespace

CapacitanceMatrix energy_oracle(const InclusionLayout& layout, double h) {
  if (layout.radius / h < 8.0)
    throw std::invalid_argument("energy_oracle: need at least 8 grid cells per disk radius");
  const LatticeBasis basis = hex_lattice();
  const int m = static_cast<int>(std::lround(1.0 / h));
  const int nd = layout.count();
  const double theta_min = 1e-3;

  OracleGrid grid;
  grid.m = m;
  grid.disk_of.assign(m * m, -1);
  grid.active_index.assign(m * m, -1);
  auto node_pos = [&](int i, int j) { return basis.lattice_point(i, j) / double(m); };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Vec2 p = node_pos(i, j);
      for (int d = 0; d < nd; ++d) {
        if (min_image_distance(p, layout.centers[d], basis) < layout.radius) {
          grid.disk_of[i * m + j] = d;
          break;
        }
      }
      if (grid.disk_of[i * m + j] < 0) grid.active_index[i * m + j] = grid.active_count++;
    }
  }

  // Nearest periodic image of a disk center to a point.
  auto nearest_center = [&](const Vec2& p, int d) {
    const Vec2 c = layout.centers[d];
    Vec2 best = c;
    double best_d = (p - c).norm();
    const Vec2 frac = basis.fractional(p - c);
    const int n1 = static_cast<int>(std::lround(frac[0]));
    const int n2 = static_cast<int>(std::lround(frac[1]));
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        const Vec2 img = c + basis.lattice_point(n1 + a, n2 + b);
        const double dist = (p - img).norm();
        if (dist < best_d) {
          best_d = dist;
          best = img;
        }
      }
    return best;
  };

  // Intersections of segment p + t e, t in [0,1], with circle d.
  auto crossings = [&](const Vec2& p, const Vec2& e, int d, double* t0, double* t1) {
    const Vec2 c = nearest_center(p + 0.5 * e, d);
    const Vec2 u = p - c;
    const double a = e.squaredNorm();
    const double b = 2.0 * u.dot(e);
    const double cc = u.squaredNorm() - layout.radius * layout.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc <= 0.0) return false;
    const double sq = std::sqrt(disc);
    *t0 = (-b - sq) / (2.0 * a);
    *t1 = (-b + sq) / (2.0 * a);
    return true;
  };

  struct Edge {
    int row = -1, col = -1;  // active indices; col == -1 for a boundary tie
    int disk = -1;           // Dirichlet disk for boundary ties
    double weight = 0.0;
  };
  std::vector<Edge> edges;
  const double w0 = 1.0 / std::sqrt(3.0);
  const int dirs[3][2] = {{1, 0}, {0, 1}, {1, 1}};

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Vec2 p = node_pos(i, j);
      const int sp = grid.disk_of[i * m + j];
      for (const auto& dir : dirs) {
        const int i2 = wrap(i + dir[0], m);
        const int j2 = wrap(j + dir[1], m);
        const int sq = grid.disk_of[i2 * m + j2];
        const Vec2 e = (basis.l1 * dir[0] + basis.l2 * dir[1]) / double(m);
        if (sp >= 0 && sq >= 0) continue;  // edge inside the inclusions
        if (sp >= 0 || sq >= 0) {
          // one endpoint inside: tie the outside node to the circle value
          const int inside_disk = sp >= 0 ? sp : sq;
          const Vec2 from = sp >= 0 ? node_pos(i2, j2) : p;  // outside endpoint
          const Vec2 along = sp >= 0 ? -e : e;
          double t0, t1;
          double theta = 1.0;
          if (crossings(from, along, inside_disk, &t0, &t1))
            theta = t0 > 0.0 ? t0 : t1;
          theta = std::clamp(theta, theta_min, 1.0);
          const int out_node = sp >= 0 ? grid.active_index[i2 * m + j2]
                                       : grid.active_index[i * m + j];
          edges.push_back({out_node, -1, inside_disk, w0 / theta});
          continue;
        }
        // both endpoints outside: check for a shallow dip through a circle
        bool dipped = false;
        for (int d = 0; d < nd && !dipped; ++d) {
          double t0, t1;
          if (!crossings(p, e, d, &t0, &t1)) continue;
          if (t0 > 0.0 && t1 < 1.0) {
            const int ap = grid.active_index[i * m + j];
            const int aq = grid.active_index[i2 * m + j2];
            edges.push_back({ap, -1, d, w0 / std::max(t0, theta_min)});
            edges.push_back({aq, -1, d, w0 / std::max(1.0 - t1, theta_min)});
            dipped = true;
          }
        }
        if (dipped) continue;
        edges.push_back({grid.active_index[i * m + j], grid.active_index[i2 * m + j2], -1, w0});
      }
    }
  }

  // Assemble the SPD graph Laplacian and one rhs per disk.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(grid.active_count, nd);
  for (const Edge& e : edges) {
    if (e.col >= 0) {
      trip.emplace_back(e.row, e.row, e.weight);
      trip.emplace_back(e.col, e.col, e.weight);
      trip.emplace_back(e.row, e.col, -e.weight);
      trip.emplace_back(e.col, e.row, -e.weight);
    } else {
      trip.emplace_back(e.row, e.row, e.weight);
      rhs(e.row, e.disk) += e.weight;
    }
  }
  Eigen::SparseMatrix<double> lap(grid.active_count, grid.active_count);
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("energy_oracle: factorization of the grid Laplacian failed");
  const Eigen::MatrixXd u = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("energy_oracle: linear solve failed");

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nd, nd);
  for (const Edge& e : edges) {
    for (int a = 0; a < nd; ++a) {
      const double da = e.col >= 0 ? u(e.row, a) - u(e.col, a)
                                   : u(e.row, a) - (e.disk == a ? 1.0 : 0.0);
      for (int b = a; b < nd; ++b) {
        const double db = e.col >= 0 ? u(e.row, b) - u(e.col, b)
                                     : u(e.row, b) - (e.disk == b ? 1.0 : 0.0);
        c(a, b) += e.weight * da * db;
      }
    }
  }
  c = c.selfadjointView<Eigen::Upper>();

  CapacitanceMatrix cap;
  cap.c = c.cast<Complex>();
  cap.alpha = Vec2::Zero();
  cap.sigma = layout.sigma;
  cap.radius = layout.radius;
  cap.nodes_per_circle = m;  // grid resolution stands in for N
  cap.periodic = true;
  cap.anti_hermitian_residual = 0.0;
  return cap;
}

}  // namespace hexband
