#include "hexband/fields.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace hexband {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Grid evaluation of S^{0,0}[d] with the screened Fourier part factorized
// through the density, so each point costs O(modes + nodes) instead of a full
// Ewald sum per node.
class PeriodicPotential {
 public:
  PeriodicPotential(const BoundaryMesh& mesh, const LatticeBasis& basis, const Density& d)
      : mesh_(&mesh), basis_(basis) {
    eta2_ = 4.0 * kPi / basis.cell_area;  // twice the balanced split, in eta^2
    dw_.resize(mesh.total_nodes());
    double dsum = 0.0;
    for (int k = 0; k < mesh.total_nodes(); ++k) {
      dw_[k] = d[k] * mesh.weights[k];
      dsum += std::abs(dw_[k]);
    }
    const double tol = 1e-13 / std::max(dsum, 1e-30);
    for (int ring = 1; ring <= 64; ++ring) {
      double ring_max = 0.0;
      for (int i = -ring; i <= ring; ++i) {
        for (int j = -ring; j <= ring; ++j) {
          if (std::max(std::abs(i), std::abs(j)) != ring) continue;
          const Vec2 q = basis.dual_point(i, j);
          const double q2 = q.squaredNorm();
          const double c = -std::exp(-q2 / (4.0 * eta2_)) / (basis.cell_area * q2);
          ring_max = std::max(ring_max, std::abs(c));
          Complex rho(0.0);
          for (int k = 0; k < mesh.total_nodes(); ++k)
            rho += dw_[k] * std::polar(1.0, -q.dot(mesh.points[k]));
          qs_.push_back(q);
          coef_.push_back(c * rho);
        }
      }
      if (ring_max * dsum < 1e-14) break;
    }
    Complex rho0(0.0);
    for (int k = 0; k < mesh.total_nodes(); ++k) rho0 += dw_[k];
    constant_ = rho0 / (4.0 * eta2_ * basis.cell_area);
  }

  Complex operator()(const Vec2& x) const {
    Complex acc = constant_;
    for (size_t m = 0; m < qs_.size(); ++m)
      acc += coef_[m] * std::polar(1.0, qs_[m].dot(x));
    for (int k = 0; k < mesh_->total_nodes(); ++k) {
      const Vec2 d0 = x - mesh_->points[k];
      const Vec2 frac = basis_.fractional(d0);
      const int n1 = static_cast<int>(std::lround(frac[0]));
      const int n2 = static_cast<int>(std::lround(frac[1]));
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          const double d2 = (d0 - basis_.lattice_point(n1 + a, n2 + b)).squaredNorm();
          const double z = eta2_ * d2;
          if (z > 34.0 || d2 < 1e-28) continue;
          acc += dw_[k] * (std::expint(-z) / (4.0 * kPi));  // -E_1(z)/4pi
        }
      }
    }
    return acc;
  }

 private:
  const BoundaryMesh* mesh_;
  LatticeBasis basis_;
  double eta2_ = 0.0;
  Density dw_;
  Complex constant_{0.0, 0.0};
  std::vector<Vec2> qs_;
  std::vector<Complex> coef_;
};

}  // namespace

FieldGrid synthesize_eigenfunction(const Eigen::VectorXcd& v,
                                   const std::vector<Density>& densities,
                                   const BoundaryMesh& mesh, const LatticeGreen& green,
                                   int grid_points, int threads) {
  const int m = mesh.circle_count();
  if (v.size() != m || static_cast<int>(densities.size()) != m)
    throw std::invalid_argument("synthesize_eigenfunction: need one density per inclusion");

  Density combined = Density::Zero(mesh.total_nodes());
  for (int j = 0; j < m; ++j) combined += v(j) * densities[j];
  const PeriodicPotential potential(mesh, green.basis(), combined);

  // constant interior traces, one potential evaluation at each center
  std::vector<Complex> trace(m);
  for (int j = 0; j < m; ++j) trace[j] = potential(mesh.layout.centers[j]);

  FieldGrid grid;
  grid.nx = grid.ny = grid_points;
  grid.x_half = 0.5;
  grid.y_half = 1.0 / std::sqrt(3.0);
  grid.values.assign(grid.nx * grid.ny, Complex(0.0));
  grid.mask.assign(grid.nx * grid.ny, 0);

  const double standoff = 2.0 * mesh.node_spacing();
  const double r = mesh.layout.radius;
  parallel_for(grid.nx * grid.ny, threads, [&](int idx) {
    const int i = idx % grid.nx;
    const int j = idx / grid.nx;
    const Vec2 p = grid.point(i, j);
    int inside = -1;
    bool near = false;
    for (int c = 0; c < m; ++c) {
      const double d = min_image_distance(p, mesh.layout.centers[c], green.basis());
      if (d < r) inside = c;
      if (std::abs(d - r) < standoff) near = true;
    }
    if (inside >= 0) {
      grid.values[idx] = trace[inside];
      grid.mask[idx] = 1;
    } else {
      grid.values[idx] = potential(p);
      grid.mask[idx] = near ? 2 : 0;
    }
  });
  return grid;
}

ParityReport parity_classify(const FieldGrid& f) {
  double even2 = 0.0, odd2 = 0.0;
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      const int idx = j * f.nx + i;
      const int flip = (f.ny - 1 - j) * f.nx + (f.nx - 1 - i);
      if (f.mask[idx] == 2 || f.mask[flip] == 2) continue;
      const Complex e = 0.5 * (f.values[idx] + f.values[flip]);
      const Complex o = 0.5 * (f.values[idx] - f.values[flip]);
      even2 += std::norm(e);
      odd2 += std::norm(o);
    }
  }
  const double total = even2 + odd2;
  ParityReport rep;
  if (total <= 0.0) {
    rep.verdict = "mixed";
    return rep;
  }
  rep.even_score = std::sqrt(even2 / total);
  rep.odd_score = std::sqrt(odd2 / total);
  rep.verdict = rep.even_score >= 0.99 ? "even" : (rep.odd_score >= 0.99 ? "odd" : "mixed");
  return rep;
}

Eigen::MatrixXd parity_reference_span(bool inversion_odd) {
  Eigen::MatrixXd span(6, 2);
  if (inversion_odd) {
    span.col(0) << 1, 1, 0, -1, -1, 0;
    span.col(1) << 1, 2, 1, -1, -2, -1;
  } else {
    span.col(0) << 1, -1, 0, 1, -1, 0;
    span.col(1) << 1, -2, 1, 1, -2, 1;
  }
  return span;
}

namespace {

double max_principal_angle(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b) {
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qa(a);
  const Eigen::MatrixXcd qa_thin =
      qa.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  const Eigen::HouseholderQR<Eigen::MatrixXd> qb(b);
  const Eigen::MatrixXd qb_thin =
      qb.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const Eigen::MatrixXcd overlap = qa_thin.adjoint() * qb_thin.cast<Complex>();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(overlap);
  const double c = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  return std::acos(c);
}

}  // namespace

SpanCheck eigenvector_span_check(const EigenDecomposition& eig, double sigma) {
  if (eig.values.size() != 6)
    throw std::invalid_argument("eigenvector_span_check expects the 6-band decomposition");
  const double scale = std::abs(eig.values(5));
  if (std::abs(eig.values(3) - eig.values(2)) < 1e-8 * scale)
    throw std::runtime_error(
        "eigenvector_span_check: bands 3 and 4 are degenerate (sigma = 0?)");

  const Eigen::MatrixXd odd = parity_reference_span(true);
  const Eigen::MatrixXd even = parity_reference_span(false);
  SpanCheck check;
  check.angle_23 = max_principal_angle(eig.vectors.middleCols(1, 2), sigma < 0 ? odd : even);
  check.angle_45 = max_principal_angle(eig.vectors.middleCols(3, 2), sigma < 0 ? even : odd);
  return check;
}

}  // namespace hexband
