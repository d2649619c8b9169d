#include "hexband/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "hexband/bands.hpp"
#include "hexband/fields.hpp"
#include "hexband/folding.hpp"

namespace hexband {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(const std::string& name, bool cond, double value) {
    ok = ok && cond;
    detail += name + "=" + fmt(value) + (cond ? "" : "[FAIL]") + " ";
  }
  void expect_le(const std::string& name, double value, double bound) {
    expect(name, value <= bound, value);
  }
  void expect_gt(const std::string& name, double value, double bound) {
    expect(name, value > bound, value);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr double kRadius = 0.086;
constexpr int kNodes = 64;

// Capacitance solutions shared between criteria 2, 3, 4, 6, 7.
struct SharedCaps {
  LatticeBasis basis = hex_lattice();
  LatticeGreen green{basis};
  std::optional<CapacitanceSolution> cap0;
  std::optional<CapacitanceMatrix> cap_minus, cap_plus;
  std::optional<EigenDecomposition> eig0, eig_minus, eig_plus;
  std::optional<BoundaryMesh> mesh0, mesh_minus, mesh_plus;

  const BoundaryMesh& mesh(double sigma) {
    auto& slot = sigma == 0.0 ? mesh0 : (sigma < 0.0 ? mesh_minus : mesh_plus);
    if (!slot) slot = discretize(build_inclusions(kRadius, sigma), kNodes);
    return *slot;
  }
  const CapacitanceSolution& at_zero() {
    if (!cap0) {
      cap0 = periodic_capacitance(mesh(0.0), green);
      eig0 = eigen_decomposition(cap0->matrix);
    }
    return *cap0;
  }
  const CapacitanceMatrix& deformed(double sigma) {
    auto& slot = sigma < 0.0 ? cap_minus : cap_plus;
    auto& eig = sigma < 0.0 ? eig_minus : eig_plus;
    if (!slot) {
      slot = periodic_capacitance(mesh(sigma), green).matrix;
      eig = eigen_decomposition(*slot);
    }
    return *slot;
  }
  const EigenDecomposition& eig(double sigma) {
    if (sigma == 0.0) {
      at_zero();
      return *eig0;
    }
    deformed(sigma);
    return sigma < 0.0 ? *eig_minus : *eig_plus;
  }
};

CriterionResult criterion1_green_oracle(int) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  const LatticeBasis basis = hex_lattice();
  const LatticeGreen green(basis);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uni(-0.45, 0.45);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  double max_err = 0.0, max_tail = 0.0;
  std::vector<std::pair<Vec2, Vec2>> used;
  std::vector<double> omegas;
  for (int trial = 0; trial < 10; ++trial) {
    Vec2 x, alpha;
    do {
      x = uni(rng) * basis.l1 + uni(rng) * basis.l2;
    } while (x.norm() < 0.05);
    do {
      alpha = uni(rng) * basis.k1 + uni(rng) * basis.k2;
    } while (alpha.norm() < 0.05 * basis.k1.norm());
    double min_beta = 1e300;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        min_beta = std::min(min_beta, (alpha + basis.dual_point(i, j)).norm());
    const double omega = (0.2 + 0.5 * u01(rng)) * min_beta;
    double tail = 0.0;
    const Complex direct = green.direct_sum(x, alpha, omega, 150, &tail);
    const Complex ewald = green.helmholtz(x, alpha, omega).value;
    max_err = std::max(max_err, std::abs(direct - ewald));
    max_tail = std::max(max_tail, tail);
    used.emplace_back(x, alpha);
    omegas.push_back(omega);
  }
  c.expect_le("oracle_dev", max_err, 1e-4);

  double eta_dev = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto& [x, alpha] = used[trial];
    Complex ref(0.0);
    for (double eta : {1.0, 2.0, 4.0}) {
      const LatticeGreen g(basis, {eta, 1, 1, 1e-12});
      const Complex v = g.helmholtz(x, alpha, omegas[trial]).value;
      if (eta == 1.0)
        ref = v;
      else
        eta_dev = std::max(eta_dev, std::abs(v - ref));
    }
  }
  c.expect_le("eta_dev", eta_dev, 1e-10);

  CriterionResult r{1, "greens-function oracle agreement", c.ok, c.detail,
                    seconds_since(t0)};
  if (r.seconds >= 10.0) {
    r.passed = false;
    r.detail += "runtime=" + fmt(r.seconds) + "[FAIL] ";
  }
  return r;
}

CriterionResult criterion2_capacitance(SharedCaps& shared, int) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  const CapacitanceSolution& sol = shared.at_zero();

  double offset_dev = 0.0;
  for (const Complex& off : sol.offsets)
    offset_dev = std::max(offset_dev, std::abs(off + 1.0 / 6.0));
  c.expect_le("offset_dev", offset_dev, 1e-6);

  const StructureReport rep = structure_report(sol.matrix);
  c.expect_le("symmetry", rep.symmetry_dev, 1e-8);
  c.expect_le("circulant", rep.circulant_dev, 1e-8);
  c.expect_le("row_sums", rep.row_sum_max, 1e-8);
  c.expect("signs", rep.sign_pattern_ok, rep.max_offdiagonal);
  c.expect_gt("c13_minus_c12", rep.c13_minus_c12, 0.0);
  c.expect_gt("c13_minus_c14", rep.c13_minus_c14, 0.0);
  c.expect_le("c12_minus_c14", std::abs(rep.c12_minus_c14), 1e-8);

  const StructureReport rep_plus = structure_report(shared.deformed(0.1));
  c.expect("deformed_monotonicity", rep_plus.monotonicity_ok, rep_plus.c13_minus_c12);

  const CapacitanceMatrix oracle =
      energy_oracle(build_inclusions(kRadius, 0.0), kRadius / 12.0);
  const double scale = sol.matrix.c.real().cwiseAbs().maxCoeff();
  const double oracle_dev =
      (oracle.c.real() - sol.matrix.c.real()).cwiseAbs().maxCoeff() / scale;
  c.expect_le("oracle_dev", oracle_dev, 0.01);

  CriterionResult r{2, "capacitance correctness", c.ok, c.detail, seconds_since(t0)};
  if (r.seconds >= 120.0) {
    r.passed = false;
    r.detail += "runtime=" + fmt(r.seconds) + "[FAIL] ";
  }
  return r;
}

CriterionResult criterion3_spectral_structure(SharedCaps& shared, int) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  for (double sigma : {-0.1, 0.0, 0.1}) {
    const Eigen::VectorXd& l = shared.eig(sigma).values;
    const std::string tag = sigma < 0 ? "m" : (sigma > 0 ? "p" : "0");
    c.expect_le("lambda1_" + tag, std::abs(l(0)), 1e-8 * l(5));
    c.expect_le("pair23_" + tag, std::abs(l(2) - l(1)) / std::abs(l(2)), 1e-6);
    c.expect_le("pair45_" + tag, std::abs(l(4) - l(3)) / std::abs(l(4)), 1e-6);
    if (sigma == 0.0)
      c.expect_le("quad_" + tag, std::abs(l(3) - l(2)) / std::abs(l(3)), 1e-6);
    else
      c.expect_gt("gap34_" + tag, l(3) - l(2), 1e-3 * l(5));
  }
  return {3, "capacitance spectral structure", c.ok, c.detail, seconds_since(t0)};
}

CriterionResult criterion4_double_cone(SharedCaps& shared, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  const MaterialParams mat;
  const double k1 = shared.basis.k1.norm();
  const BoundaryMesh& mesh = shared.mesh(0.0);
  const ConeFit lower = fit_dirac_cone(Vec2::Zero(), 6, 0.01 * k1, 0.05 * k1, 6, {1, 2},
                                       mesh, shared.green, mat, threads);
  const ConeFit upper = fit_dirac_cone(Vec2::Zero(), 6, 0.01 * k1, 0.05 * k1, 6, {3, 4},
                                       mesh, shared.green, mat, threads);
  c.expect_le("residual_lower", lower.residual, 0.01);
  c.expect_le("residual_upper", upper.residual, 0.01);
  c.expect_le("spread_lower", lower.slope_spread, 0.02);
  c.expect_le("spread_upper", upper.slope_spread, 0.02);
  c.expect("lower_decreasing", lower.decreasing, lower.slope);
  c.expect("upper_increasing", !upper.decreasing, upper.slope);
  c.expect_le("shared_vertex",
              std::abs(lower.omega_star - upper.omega_star) /
                  std::max(lower.omega_star, upper.omega_star),
              1e-4);
  return {4, "double Dirac cone at Gamma", c.ok, c.detail, seconds_since(t0)};
}

CriterionResult criterion5_folding(SharedCaps& shared, int) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;

  const FoldedSpectrumReport rep = folded_spectrum_check(kRadius, kNodes);
  c.expect_le("multiset_dev", rep.multiset_deviation, 1e-6);

  const BoundaryMesh& mesh = shared.mesh(0.0);
  const InclusionLayout sub = build_inclusions(kRadius, 0.0, CellVariant::SubCell);
  const BoundaryMesh submesh = discretize(sub, kNodes);
  const LatticeGreen subgreen(sublattice(shared.basis));
  const std::vector<Vec2> probes = folding_probes(mesh.layout, 10);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double res_periodic = 0.0, res_quasi = 0.0, res_helmholtz = 0.0;
  for (int rep_i = 0; rep_i < 3; ++rep_i) {
    Density phi(mesh.total_nodes());
    for (int i = 0; i < phi.size(); ++i) phi[i] = Complex(uni(rng), uni(rng));
    phi = project_mean_zero(phi, mesh);
    res_periodic = std::max(
        res_periodic, verify_folding_identity(phi, mesh, shared.green, submesh, subgreen,
                                              Vec2::Zero(), 0.0, probes));
    res_quasi = std::max(
        res_quasi, verify_folding_identity(phi, mesh, shared.green, submesh, subgreen,
                                           0.05 * shared.basis.k1, 0.0, probes));
    res_helmholtz = std::max(
        res_helmholtz, verify_folding_identity(phi, mesh, shared.green, submesh, subgreen,
                                               0.02 * shared.basis.k1, 0.3, probes));
  }
  c.expect_le("identity_periodic", res_periodic, 1e-8);
  c.expect_le("identity_quasi", res_quasi, 1e-8);
  c.expect_le("identity_helmholtz", res_helmholtz, 1e-8);

  bool partition_ok = true;
  for (int n1 = -10; n1 <= 10; ++n1) {
    for (int n2 = -10; n2 <= 10; ++n2) {
      const DualClass d = classify_dual(n1, n2);
      const int o1 = d.cls == 1 ? 1 : 0;
      const int o2 = d.cls == 2 ? 1 : 0;
      partition_ok = partition_ok && (2 * d.m1 - d.m2 + o1 == n1) &&
                     (2 * d.m2 - d.m1 + o2 == n2) && d.cls >= 0 && d.cls <= 2;
    }
  }
  c.expect("dual_partition", partition_ok, partition_ok ? 1.0 : 0.0);

  CriterionResult r{5, "band folding", c.ok, c.detail, seconds_since(t0)};
  if (r.seconds >= 60.0) {
    r.passed = false;
    r.detail += "runtime=" + fmt(r.seconds) + "[FAIL] ";
  }
  return r;
}

CriterionResult criterion6_gap_and_parity(SharedCaps& shared, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  const MaterialParams mat;
  const double k1 = shared.basis.k1.norm();

  for (double sigma : {-0.1, 0.1}) {
    const std::string tag = sigma < 0 ? "m" : "p";
    const BoundaryMesh& mesh = shared.mesh(sigma);
    std::vector<Vec2> alphas = {Vec2::Zero()};
    for (int d = 0; d < 8; ++d) {
      const double angle = 2.0 * kPi * d / 8 + 0.13;
      for (int s = 1; s <= 5; ++s)
        alphas.push_back(0.2 * k1 * s / 5.0 * Vec2(std::cos(angle), std::sin(angle)));
    }
    const auto samples = sample_band_path(alphas, {}, mesh, shared.green, mat, threads);
    c.expect_gt("gap_" + tag, local_gap(samples, 2, 3), 0.0);

    const CapacitanceSolution sol = periodic_capacitance(mesh, shared.green);
    const EigenDecomposition eig = eigen_decomposition(sol.matrix);
    double score = 1.0;
    for (int band : {1, 2}) {
      const FieldGrid grid = synthesize_eigenfunction(eig.vectors.col(band), sol.densities,
                                                      mesh, shared.green, 101, threads);
      const ParityReport parity = parity_classify(grid);
      score = std::min(score, sigma < 0 ? parity.odd_score : parity.even_score);
    }
    c.expect("parity_" + tag, score >= 0.99, score);

    const SpanCheck span = eigenvector_span_check(eig, sigma);
    c.expect_le("span23_" + tag, span.angle_23, 1e-6);
    c.expect_le("span45_" + tag, span.angle_45, 1e-6);
  }
  return {6, "gap opening and parity flip", c.ok, c.detail, seconds_since(t0)};
}

CriterionResult criterion7_bie_crosscheck(SharedCaps& shared, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  // Speed-matched contrast: delta = 1/50 with v0 = vb = 1 keeps the whole
  // subwavelength window below the first empty-lattice band.
  MaterialParams mat;
  mat.rho1 = 0.02;
  mat.kappa1 = 0.02;

  const BoundaryMesh mesh = discretize(build_inclusions(kRadius, 0.0), 32);
  const LatticeGreen green(shared.basis, {0.0, 1, 1, 1e-9});
  const InclusionLayout& layout = mesh.layout;

  // four-fold cluster at Gamma
  {
    const std::vector<double> asym =
        asymptotic_bands(shared.eig(0.0).values, mat, layout);
    const double lo = 0.7 * asym[1];
    const double hi = 0.5 * (asym[4] + asym[5]);
    const DispersionResult res =
        dispersion_roots(mesh, green, Vec2::Zero(), mat, lo, hi, 160, 1e-6, threads);
    int total_mult = 0;
    double wmin = 1e300, wmax = 0.0;
    for (size_t i = 0; i < res.roots.size(); ++i) {
      total_mult += res.multiplicities[i];
      wmin = std::min(wmin, res.roots[i]);
      wmax = std::max(wmax, res.roots[i]);
    }
    c.expect("gamma_cluster_mult", total_mult == 4, double(total_mult));
    const double spread = res.roots.empty() ? 1e300 : (wmax - wmin) / (0.5 * (wmax + wmin));
    c.expect_le("gamma_cluster_spread", spread, 1e-2);
  }

  // three quasi-periodic test points
  const std::vector<Vec2> test_alphas = {0.30 * shared.basis.k1 + 0.10 * shared.basis.k2,
                                         0.45 * shared.basis.k1,
                                         0.20 * shared.basis.k1 + 0.35 * shared.basis.k2};
  for (size_t t = 0; t < test_alphas.size(); ++t) {
    const Vec2 alpha = test_alphas[t];
    const EigenDecomposition eig =
        eigen_decomposition(quasiperiodic_capacitance(shared.mesh(0.0), shared.green, alpha));
    const std::vector<double> asym = asymptotic_bands(eig.values, mat, layout);
    const DispersionResult res =
        dispersion_roots(mesh, green, alpha, mat, 0.55 * asym[1], 1.15 * asym[5], 160, 1e-6,
                         threads);
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      double best = 1e300;
      for (double root : res.roots) best = std::min(best, std::abs(root - asym[n]) / asym[n]);
      worst = std::max(worst, best);
    }
    c.expect_le("asym_dev_alpha" + std::to_string(t + 1), worst, 0.10);
  }
  return {7, "full boundary-integral cross-check", c.ok, c.detail, seconds_since(t0)};
}

CriterionResult criterion8_appendix(SharedCaps& shared, int) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  const BoundaryMesh& mesh = shared.mesh(0.0);
  const NpKernelReport rep = np_kernel_dimension(mesh, shared.green, 1e-6);
  c.expect("kernel_dim", rep.dimension == 5, double(rep.dimension));
  c.expect_gt("gap_ratio", rep.gap_ratio, 100.0);
  for (int m = 0; m < 5; ++m) {
    double amax = 0.0;
    for (double a : rep.traces[m]) amax = std::max(amax, std::abs(a));
    c.expect_le("trace_sum_" + std::to_string(m), rep.trace_sums[m], 1e-6 * amax);
    c.expect_le("mean_zero_" + std::to_string(m), rep.density_means[m], 1e-8);
  }

  // adjoint identity: int K*[phi] = (1/2 - |D|/|Y|) int phi
  const OperatorMatrix kstar = assemble_np_adjoint(mesh, shared.green, Vec2::Zero(), 0.0);
  const double ratio = 0.5 - mesh.layout.area() / shared.basis.cell_area;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double dev = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Density phi(mesh.total_nodes());
    for (int i = 0; i < phi.size(); ++i) phi[i] = Complex(uni(rng), uni(rng));
    const Density kphi = kstar.m * phi;
    const Complex lhs = integrate(kphi, mesh);
    const Complex rhs = ratio * integrate(phi, mesh);
    dev = std::max(dev, std::abs(lhs - rhs));
  }
  c.expect_le("adjoint_identity", dev, 1e-8);
  return {8, "appendix kernel and trace properties", c.ok, c.detail, seconds_since(t0)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int threads) {
  SharedCaps shared;
  std::vector<CriterionResult> results;
  results.push_back(criterion1_green_oracle(threads));
  results.push_back(criterion2_capacitance(shared, threads));
  results.push_back(criterion3_spectral_structure(shared, threads));
  results.push_back(criterion4_double_cone(shared, threads));
  results.push_back(criterion5_folding(shared, threads));
  results.push_back(criterion6_gap_and_parity(shared, threads));
  results.push_back(criterion7_bie_crosscheck(shared, threads));
  results.push_back(criterion8_appendix(shared, threads));
  return results;
}

}  // namespace hexband
