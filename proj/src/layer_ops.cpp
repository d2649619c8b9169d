#include "hexband/layer_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace hexband {

namespace {

// value(-d) = conj(value(d)), grad(-d) = -conj(grad(d)) for real alpha, omega.
inline GreensEval mirrored(const GreensEval& g) {
  GreensEval m;
  m.value = std::conj(g.value);
  m.gradient = -g.gradient.conjugate();
  return m;
}

inline Complex normal_dot(const Vec2& n, const CVec2& grad) {
  return n.x() * grad.x() + n.y() * grad.y();
}

// Circular weights of the Martensen-Kussmaul rule for the kernel
// log(4 sin^2((t - tau)/2)) on an N-point periodic trapezoid grid.
std::vector<double> kress_log_weights(int n) {
  std::vector<double> r(n, 0.0);
  const int half = n / 2;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int m = 1; m < half; ++m) s += std::cos(2.0 * kPi * m * j / n) / m;
    r[j] = -(4.0 * kPi / n) * s - (4.0 * kPi / (double(n) * n)) * std::cos(kPi * j);
  }
  return r;
}

}  // namespace

LayerAssembler::LayerAssembler(const BoundaryMesh& mesh, const LatticeGreen& green,
                               const Vec2& alpha)
    : mesh_(&mesh), green_(&green), alpha_(alpha) {
  const int nc = mesh.circle_count();
  const int n = mesh.nodes_per_circle;
  for (int c = 0; c < nc; ++c)
    for (int cp = c + 1; cp < nc; ++cp) pairs_.emplace_back(c, cp);
  kress_ = kress_log_weights(n);

  laplace_ = build_table(
      [&](const Vec2& d) { return green.laplace_regular(d, alpha_); },
      [&](const Vec2& d) { return green.laplace(d, alpha_); });
}

template <typename FSame, typename FCross>
LayerAssembler::Table LayerAssembler::build_table(FSame&& same_eval,
                                                  FCross&& cross_eval) const {
  const int n = mesh_->nodes_per_circle;
  const double r = mesh_->layout.radius;
  Table t;
  t.same.resize(n * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 ei(std::cos(mesh_->angles[i]), std::sin(mesh_->angles[i]));
    for (int k = i; k < n; ++k) {
      const Vec2 ek(std::cos(mesh_->angles[k]), std::sin(mesh_->angles[k]));
      const GreensEval g = same_eval(r * (ei - ek));
      t.same[i * n + k] = g;
      if (k != i) t.same[k * n + i] = mirrored(g);
    }
  }
  t.cross.resize(pairs_.size());
  for (size_t p = 0; p < pairs_.size(); ++p) {
    auto& tab = t.cross[p];
    tab.resize(n * n);
    for (int i = 0; i < n; ++i) {
      const int ii = mesh_->node_index(pairs_[p].first, i);
      for (int k = 0; k < n; ++k) {
        const int kk = mesh_->node_index(pairs_[p].second, k);
        tab[i * n + k] = cross_eval(mesh_->points[ii] - mesh_->points[kk]);
      }
    }
  }
  return t;
}

void LayerAssembler::ensure_power_tables() const {
  std::call_once(power_once_, [&] {
    t2_ = build_table([&](const Vec2& d) { return green_->power_sum(d, alpha_, 2); },
                      [&](const Vec2& d) { return green_->power_sum(d, alpha_, 2); });
    t4_ = build_table([&](const Vec2& d) { return green_->power_sum(d, alpha_, 3); },
                      [&](const Vec2& d) { return green_->power_sum(d, alpha_, 3); });
  });
}

LayerAssembler::Table LayerAssembler::kummer_table(double omega) const {
  ensure_power_tables();
  const double w2 = omega * omega;
  const double w4 = w2 * w2;
  auto tail = [&](const Vec2& d) { return green_->helmholtz_tail(d, alpha_, omega); };
  Table t = build_table(tail, tail);
  auto combine = [&](GreensEval& out, const GreensEval& p2, const GreensEval& p4) {
    out.value += -w2 * p2.value - w4 * p4.value;
    out.gradient += -w2 * p2.gradient - w4 * p4.gradient;
  };
  for (size_t i = 0; i < t.same.size(); ++i) combine(t.same[i], t2_.same[i], t4_.same[i]);
  for (size_t p = 0; p < t.cross.size(); ++p)
    for (size_t i = 0; i < t.cross[p].size(); ++i)
      combine(t.cross[p][i], t2_.cross[p][i], t4_.cross[p][i]);
  return t;
}

void LayerAssembler::assemble(const Table* kummer, Eigen::MatrixXcd* single,
                              Eigen::MatrixXcd* np) const {
  const int nc = mesh_->circle_count();
  const int n = mesh_->nodes_per_circle;
  const int total = nc * n;
  const double r = mesh_->layout.radius;
  const double w = 2.0 * kPi * r / n;
  const double log_r_part = std::log(r) / (2.0 * kPi);
  const double np_diag = 1.0 / (4.0 * kPi * r);

  if (single) single->setZero(total, total);
  if (np) np->setZero(total, total);

  for (int i = 0; i < n; ++i) {
    const Vec2 ni(std::cos(mesh_->angles[i]), std::sin(mesh_->angles[i]));
    for (int k = 0; k < n; ++k) {
      GreensEval g = laplace_.same[i * n + k];
      if (kummer) {
        g.value += kummer->same[i * n + k].value;
        g.gradient += kummer->same[i * n + k].gradient;
      }
      const Complex s_entry =
          r / (4.0 * kPi) * kress_[((i - k) % n + n) % n] + w * (log_r_part + g.value);
      const Complex np_entry = w * (np_diag + normal_dot(ni, g.gradient));
      for (int c = 0; c < nc; ++c) {
        const int row = c * n + i;
        const int col = c * n + k;
        if (single) (*single)(row, col) = s_entry;
        if (np) (*np)(row, col) = np_entry;
      }
    }
  }

  for (size_t p = 0; p < pairs_.size(); ++p) {
    const int c = pairs_[p].first;
    const int cp = pairs_[p].second;
    for (int i = 0; i < n; ++i) {
      const Vec2 ni(std::cos(mesh_->angles[i]), std::sin(mesh_->angles[i]));
      for (int k = 0; k < n; ++k) {
        GreensEval g = laplace_.cross[p][i * n + k];
        if (kummer) {
          g.value += kummer->cross[p][i * n + k].value;
          g.gradient += kummer->cross[p][i * n + k].gradient;
        }
        const Vec2 nk(std::cos(mesh_->angles[k]), std::sin(mesh_->angles[k]));
        if (single) {
          (*single)(c * n + i, cp * n + k) = w * g.value;
          (*single)(cp * n + k, c * n + i) = w * std::conj(g.value);
        }
        if (np) {
          (*np)(c * n + i, cp * n + k) = w * normal_dot(ni, g.gradient);
          (*np)(cp * n + k, c * n + i) = -w * normal_dot(nk, g.gradient.conjugate());
        }
      }
    }
  }
}

OperatorMatrix LayerAssembler::single_layer(double omega) const {
  OperatorMatrix op;
  op.alpha = alpha_;
  op.omega = omega;
  op.kind = OperatorKind::SingleLayer;
  if (omega == 0.0) {
    assemble(nullptr, &op.m, nullptr);
  } else {
    const Table t = kummer_table(omega);
    assemble(&t, &op.m, nullptr);
  }
  return op;
}

OperatorMatrix LayerAssembler::np_adjoint(double omega) const {
  OperatorMatrix op;
  op.alpha = alpha_;
  op.omega = omega;
  op.kind = OperatorKind::NpAdjoint;
  if (omega == 0.0) {
    assemble(nullptr, nullptr, &op.m);
  } else {
    const Table t = kummer_table(omega);
    assemble(&t, nullptr, &op.m);
  }
  return op;
}

OperatorMatrix LayerAssembler::block_a(double omega, const MaterialParams& mat) const {
  if (!(omega > 0.0)) throw std::invalid_argument("block A requires omega > 0");
  mat.validate();
  const double kb = mat.kb(omega);
  const double k0 = mat.k0(omega);

  Eigen::MatrixXcd s_b, k_b, s_0, k_0;
  const Table tb = kummer_table(kb);
  assemble(&tb, &s_b, &k_b);
  if (std::abs(kb - k0) < 1e-15) {
    s_0 = s_b;
    k_0 = k_b;
  } else {
    const Table t0 = kummer_table(k0);
    assemble(&t0, &s_0, &k_0);
  }

  const int total = mesh_->total_nodes();
  OperatorMatrix op;
  op.alpha = alpha_;
  op.omega = omega;
  op.kind = OperatorKind::BlockA;
  op.m.setZero(2 * total, 2 * total);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(total, total);
  op.m.topLeftCorner(total, total) = s_b;
  op.m.topRightCorner(total, total) = -s_0;
  op.m.bottomLeftCorner(total, total) = -0.5 * id + k_b;
  op.m.bottomRightCorner(total, total) = -mat.delta() * (0.5 * id + k_0);
  return op;
}

OperatorMatrix assemble_single_layer(const BoundaryMesh& mesh, const LatticeGreen& green,
                                     const Vec2& alpha, double omega) {
  return LayerAssembler(mesh, green, alpha).single_layer(omega);
}

OperatorMatrix assemble_np_adjoint(const BoundaryMesh& mesh, const LatticeGreen& green,
                                   const Vec2& alpha, double omega) {
  return LayerAssembler(mesh, green, alpha).np_adjoint(omega);
}

OperatorMatrix assemble_block_a(const BoundaryMesh& mesh, const LatticeGreen& green,
                                const Vec2& alpha, double omega, const MaterialParams& mat) {
  return LayerAssembler(mesh, green, alpha).block_a(omega, mat);
}

AugmentedSolution solve_augmented(const OperatorMatrix& single_layer, const Density& rhs,
                                  const BoundaryMesh& mesh) {
  if (single_layer.kind != OperatorKind::SingleLayer)
    throw std::invalid_argument("solve_augmented expects a single-layer matrix");
  const int n = static_cast<int>(single_layer.m.rows());
  if (rhs.size() != n) throw std::invalid_argument("solve_augmented: rhs size mismatch");

  Eigen::MatrixXcd a(n + 1, n + 1);
  a.topLeftCorner(n, n) = single_layer.m;
  a.col(n).head(n).setConstant(-1.0);  // S[phi] = rhs + c chi_dD
  for (int k = 0; k < n; ++k) a(n, k) = mesh.weights[k];
  a(n, n) = 0.0;

  Eigen::VectorXcd b(n + 1);
  b.head(n) = rhs;
  b(n) = 0.0;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error("solve_augmented: augmented system is ill-conditioned");
  const Eigen::VectorXcd x = lu.solve(b);
  AugmentedSolution sol;
  sol.density = x.head(n);
  sol.offset = x(n);
  return sol;
}

Density solve_plain(const OperatorMatrix& single_layer, const Density& rhs) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(single_layer.m);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error("solve_plain: single-layer matrix is ill-conditioned");
  return lu.solve(rhs);
}

Complex evaluate_potential(const Density& d, const BoundaryMesh& mesh,
                           const LatticeGreen& green, const Vec2& x, const Vec2& alpha,
                           double omega, bool* near) {
  if (d.size() != mesh.total_nodes())
    throw std::invalid_argument("evaluate_potential: density size mismatch");
  if (near) {
    *near = false;
    const double standoff = 2.0 * mesh.node_spacing();
    for (const Vec2& c : mesh.layout.centers) {
      const double dist = std::abs(min_image_distance(x, c, green.basis()) - mesh.layout.radius);
      if (dist < standoff) *near = true;
    }
  }
  Complex acc(0.0);
  for (int k = 0; k < mesh.total_nodes(); ++k) {
    if (d[k] == Complex(0.0)) continue;
    acc += green.helmholtz(x - mesh.points[k], alpha, omega).value * d[k] * mesh.weights[k];
  }
  return acc;
}

CVec2 evaluate_potential_gradient(const Density& d, const BoundaryMesh& mesh,
                                  const LatticeGreen& green, const Vec2& x,
                                  const Vec2& alpha, double omega) {
  CVec2 acc = CVec2::Zero();
  for (int k = 0; k < mesh.total_nodes(); ++k) {
    if (d[k] == Complex(0.0)) continue;
    acc += green.helmholtz(x - mesh.points[k], alpha, omega).gradient * d[k] * mesh.weights[k];
  }
  return acc;
}

NpKernelReport np_kernel_dimension(const BoundaryMesh& mesh, const LatticeGreen& green,
                                   double tol) {
  if (mesh.circle_count() != 6)
    throw std::invalid_argument("np_kernel_dimension expects the 6-disk mesh");
  const LayerAssembler assembler(mesh, green, Vec2::Zero());
  const OperatorMatrix kstar = assembler.np_adjoint(0.0);
  const OperatorMatrix single = assembler.single_layer(0.0);

  const int total = mesh.total_nodes();
  // The periodic kernel is real; a real SVD keeps the near-kernel basis real
  // so the trace constants come out real as well.
  if (kstar.m.imag().cwiseAbs().maxCoeff() > 1e-10 * kstar.m.norm())
    throw std::runtime_error("np_kernel_dimension: periodic NP matrix is not real");
  Eigen::MatrixXd b = kstar.m.real();
  b.diagonal().array() -= 0.5;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();  // descending
  const double norm = sv(0);

  NpKernelReport rep;
  for (int i = 0; i < total; ++i)
    if (sv(i) < tol * norm) ++rep.dimension;
  rep.gap_ratio = sv(total - 6) / std::max(sv(total - 5), 1e-18 * norm);
  for (int i = 0; i < 8 && i < total; ++i) rep.smallest.push_back(sv(total - 1 - i));

  const int nkern = std::min(rep.dimension, 8);
  for (int m = 0; m < nkern; ++m) {
    const Eigen::VectorXd psi = svd.matrixV().col(total - 1 - m);
    const Eigen::VectorXd u = single.m.real() * psi;
    std::vector<double> traces(6);
    double dev = 0.0;
    double sum = 0.0;
    for (int c = 0; c < 6; ++c) {
      double mean = 0.0;
      for (int k = 0; k < mesh.nodes_per_circle; ++k) mean += u[mesh.node_index(c, k)];
      mean /= double(mesh.nodes_per_circle);
      for (int k = 0; k < mesh.nodes_per_circle; ++k)
        dev = std::max(dev, std::abs(u[mesh.node_index(c, k)] - mean));
      traces[c] = mean;
      sum += mean;
    }
    rep.traces.push_back(traces);
    rep.trace_sums.push_back(std::abs(sum));
    rep.trace_deviation.push_back(dev);
    rep.density_means.push_back(std::abs(integrate(psi.cast<Complex>(), mesh)));
  }
  return rep;
}

}  // namespace hexband
