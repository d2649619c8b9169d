#include "hexband/folding.hpp"

#include <cmath>
#include <stdexcept>

namespace hexband {

namespace {

struct Family {
  int base = 0;                  // 0 for D1/D3/D5, 1 for D2/D4/D6
  std::array<int, 3> circles{};  // member circles of the full mesh
  std::array<Vec2, 3> shifts{};  // sub-lattice translations base -> member
};

std::array<Family, 2> families() {
  const LatticeBasis sub = sublattice(hex_lattice());
  Family odd;
  odd.base = 0;
  odd.circles = {0, 2, 4};
  odd.shifts = {Vec2::Zero(), sub.l1, sub.l1 - sub.l2};
  Family even;
  even.base = 1;
  even.circles = {1, 3, 5};
  even.shifts = {Vec2::Zero(), sub.l1 - sub.l2, -sub.l2};
  return {odd, even};
}

void require_super_honeycomb(const BoundaryMesh& mesh) {
  if (mesh.circle_count() != 6)
    throw std::invalid_argument("density decomposition requires the 6-disk mesh");
  if (mesh.layout.sigma != 0.0)
    throw std::invalid_argument(
        "the folding identity requires the sigma = 0 super honeycomb layout");
}

}  // namespace

DualClass classify_dual(int n1, int n2) {
  DualClass d;
  d.cls = ((n1 - n2) % 3 + 3) % 3;
  const int o1 = d.cls == 1 ? 1 : 0;
  const int o2 = d.cls == 2 ? 1 : 0;
  d.m1 = (2 * (n1 - o1) + (n2 - o2)) / 3;
  d.m2 = ((n1 - o1) + 2 * (n2 - o2)) / 3;
  return d;
}

DensitySplit decompose_density(const Density& phi, const BoundaryMesh& mesh,
                               const Vec2& epsilon) {
  require_super_honeycomb(mesh);
  if (phi.size() != mesh.total_nodes())
    throw std::invalid_argument("decompose_density: density size mismatch");

  const LatticeBasis basis = hex_lattice();
  const std::array<Vec2, 3> alphas = {epsilon, basis.k1 + epsilon, basis.k2 + epsilon};

  DensitySplit split;
  for (auto& p : split.parts) p = Density::Zero(mesh.total_nodes());

  for (const Family& fam : families()) {
    Eigen::Matrix3cd m;
    for (int row = 0; row < 3; ++row)
      for (int c = 0; c < 3; ++c)
        m(row, c) = std::exp(kI * alphas[c].dot(fam.shifts[row]));
    const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!(cond < 1e8))
      throw std::runtime_error("decompose_density: phase system is numerically singular");
    const Eigen::Matrix3cd minv = m.inverse();

    for (int k = 0; k < mesh.nodes_per_circle; ++k) {
      Eigen::Vector3cd g;
      for (int row = 0; row < 3; ++row) g(row) = phi[mesh.node_index(fam.circles[row], k)];
      const Eigen::Vector3cd f = minv * g;
      for (int c = 0; c < 3; ++c)
        for (int row = 0; row < 3; ++row)
          split.parts[c][mesh.node_index(fam.circles[row], k)] = m(row, c) * f(c);
    }
  }
  return split;
}

Density restrict_to_subcell(const Density& component, const BoundaryMesh& mesh,
                            const BoundaryMesh& submesh) {
  if (submesh.circle_count() != 2 || submesh.nodes_per_circle != mesh.nodes_per_circle)
    throw std::invalid_argument("restrict_to_subcell: incompatible meshes");
  Density d = Density::Zero(submesh.total_nodes());
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < mesh.nodes_per_circle; ++k)
      d[submesh.node_index(b, k)] = component[mesh.node_index(b, k)];
  return d;
}

double verify_folding_identity(const Density& phi, const BoundaryMesh& mesh,
                               const LatticeGreen& green, const BoundaryMesh& submesh,
                               const LatticeGreen& subgreen, const Vec2& epsilon,
                               double omega, const std::vector<Vec2>& probes) {
  require_super_honeycomb(mesh);
  const LatticeBasis basis = hex_lattice();
  const std::array<Vec2, 3> alphas = {epsilon, basis.k1 + epsilon, basis.k2 + epsilon};

  const DensitySplit split = decompose_density(phi, mesh, epsilon);
  std::array<Density, 3> sub;
  for (int c = 0; c < 3; ++c) sub[c] = restrict_to_subcell(split.parts[c], mesh, submesh);

  double residual = 0.0;
  for (const Vec2& x : probes) {
    const Complex lhs = evaluate_potential(phi, mesh, green, x, epsilon, omega);
    Complex rhs(0.0);
    for (int c = 0; c < 3; ++c)
      rhs += evaluate_potential(sub[c], submesh, subgreen, x, alphas[c], omega);
    residual = std::max(residual, std::abs(lhs - rhs));
  }
  return residual;
}

std::vector<Vec2> folding_probes(const InclusionLayout& layout, int count, double standoff) {
  const LatticeBasis basis = hex_lattice();
  std::vector<Vec2> probes;
  // low-discrepancy sweep over the cell, keeping clear of every circle
  double u = 0.234, v = 0.567;
  while (static_cast<int>(probes.size()) < count) {
    u = std::fmod(u + 0.754877666, 1.0);
    v = std::fmod(v + 0.569840291, 1.0);
    const Vec2 x = (u - 0.5) * basis.l1 + (v - 0.5) * basis.l2;
    bool ok = true;
    for (const Vec2& c : layout.centers) {
      if (std::abs(min_image_distance(x, c, basis) - layout.radius) < standoff) ok = false;
    }
    if (ok) probes.push_back(x);
  }
  return probes;
}

FoldedSpectrumReport folded_spectrum_check(double radius, int nodes_per_circle,
                                           const LatticeSumParams& params) {
  const LatticeBasis basis = hex_lattice();
  const LatticeGreen green(basis, params);
  const LatticeGreen subgreen(sublattice(basis), params);

  const InclusionLayout full = build_inclusions(radius, 0.0, CellVariant::FullCell);
  const InclusionLayout sub = build_inclusions(radius, 0.0, CellVariant::SubCell);
  const BoundaryMesh mesh = discretize(full, nodes_per_circle);
  const BoundaryMesh submesh = discretize(sub, nodes_per_circle);

  FoldedSpectrumReport rep;
  rep.full_spectrum = eigen_decomposition(periodic_capacitance(mesh, green).matrix).values;

  const Eigen::VectorXd at_gamma =
      eigen_decomposition(periodic_capacitance(submesh, subgreen).matrix).values;
  const Eigen::VectorXd at_k1 =
      eigen_decomposition(quasiperiodic_capacitance(submesh, subgreen, basis.k1)).values;
  const Eigen::VectorXd at_k2 =
      eigen_decomposition(quasiperiodic_capacitance(submesh, subgreen, basis.k2)).values;

  rep.gamma_zero_eigenvalue = at_gamma(0);
  rep.kpoint_pair_deviation =
      std::max(std::abs(at_k1(0) - at_k2(0)), std::abs(at_k1(1) - at_k2(1)));

  std::vector<double> pool = {at_gamma(0), at_gamma(1), at_k1(0), at_k1(1), at_k2(0), at_k2(1)};
  std::sort(pool.begin(), pool.end());
  rep.subcell_union = Eigen::Map<Eigen::VectorXd>(pool.data(), 6);

  const double scale = rep.full_spectrum.cwiseAbs().maxCoeff();
  rep.multiset_deviation =
      (rep.full_spectrum - rep.subcell_union).cwiseAbs().maxCoeff() / scale;
  return rep;
}

}  // namespace hexband
