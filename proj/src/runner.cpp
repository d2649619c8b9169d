#include "hexband/runner.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hexband/artifacts.hpp"
#include "hexband/bands.hpp"
#include "hexband/fields.hpp"
#include "hexband/folding.hpp"
#include "hexband/validation.hpp"

namespace hexband {

namespace {

using nlohmann::json;

struct Workspace {
  LatticeBasis basis;
  HighSymmetryPoints hs;
  InclusionLayout layout;
  BoundaryMesh mesh;
  LatticeGreen green;

  Workspace(const ExperimentConfig& cfg)
      : basis(hex_lattice()),
        hs(high_symmetry_points(basis)),
        layout(build_inclusions(cfg.geometry.radius, cfg.geometry.sigma)),
        mesh(discretize(layout, cfg.discretization.nodes_per_circle)),
        green(basis, {cfg.discretization.ewald_split, 1, 1, cfg.discretization.lattice_tol}) {}
};

Vec2 corner_by_name(const std::string& name, const HighSymmetryPoints& hs) {
  if (name == "G" || name == "GAMMA" || name == "Gamma") return hs.gamma;
  if (name == "M1") return hs.m1;
  if (name == "M2") return hs.m2;
  if (name == "K1" || name == "A1") return hs.alpha1;
  if (name == "K2" || name == "A2") return hs.alpha2;
  throw std::runtime_error("unknown high-symmetry point '" + name +
                           "' (expected G, M1, M2, K1, K2)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

json fit_to_json(const ConeFit& fit) {
  return json{{"omega_star", fit.omega_star},
              {"slope", fit.slope},
              {"slope_spread", fit.slope_spread},
              {"omega_star_spread", fit.omega_star_spread},
              {"residual", fit.residual},
              {"direction_slopes", fit.direction_slopes},
              {"direction_offsets", fit.direction_offsets},
              {"decreasing", fit.decreasing}};
}

json config_meta(const ExperimentConfig& cfg) {
  json meta;
  meta["config_hash"] = cfg.hash();
  for (const auto& [k, v] : cfg.echo()) meta["config"][k] = v;
  return meta;
}

void write_capacitance_csv(const std::string& path, const ExperimentConfig& cfg,
                           const Eigen::MatrixXcd& c) {
  std::vector<std::string> cols;
  for (int k = 0; k < c.cols(); ++k) cols.push_back("c" + std::to_string(k + 1));
  std::vector<std::vector<std::string>> rows;
  for (int j = 0; j < c.rows(); ++j) {
    std::vector<std::string> row;
    for (int k = 0; k < c.cols(); ++k) {
      const Complex v = c(j, k);
      row.push_back(std::abs(v.imag()) < 1e-300 ? format_number(v.real())
                                                : format_number(v.real()) + "+" +
                                                      format_number(v.imag()) + "i");
    }
    rows.push_back(row);
  }
  write_csv(path, csv_header(cfg), cols, rows);
}

int cmd_capacitance(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  (void)threads;
  Workspace ws(cfg);
  const CapacitanceSolution sol = periodic_capacitance(ws.mesh, ws.green);
  const EigenDecomposition eig = eigen_decomposition(sol.matrix);
  const StructureReport rep = structure_report(sol.matrix);

  write_capacitance_csv(dir + "/capacitance.csv", cfg, sol.matrix.c);
  std::vector<std::string> cols;
  for (int n = 1; n <= 6; ++n) cols.push_back("lambda_" + std::to_string(n));
  std::vector<std::string> row;
  for (int n = 0; n < 6; ++n) row.push_back(format_number(eig.values(n)));
  write_csv(dir + "/eigenvalues.csv", csv_header(cfg), cols, {row});

  json j = config_meta(cfg);
  j["sigma"] = cfg.geometry.sigma;
  j["radius"] = cfg.geometry.radius;
  j["nodes_per_circle"] = cfg.discretization.nodes_per_circle;
  j["alpha"] = {0.0, 0.0};
  j["deformation"] = ws.layout.deformation_label();
  j["offsets_re"] = json::array();
  for (const Complex& c : sol.offsets) j["offsets_re"].push_back(c.real());
  j["anti_hermitian_residual"] = sol.matrix.anti_hermitian_residual;
  j["eigenvalues"] = std::vector<double>(eig.values.data(), eig.values.data() + 6);
  j["eigen_residual"] = eig.residual;
  j["structure"] = {{"symmetry_dev", rep.symmetry_dev},
                    {"imag_dev", rep.imag_dev},
                    {"circulant_dev", rep.circulant_dev},
                    {"row_sum_max", rep.row_sum_max},
                    {"c13_minus_c15", rep.c13_minus_c15},
                    {"c12_minus_c16", rep.c12_minus_c16},
                    {"min_diagonal", rep.min_diagonal},
                    {"max_offdiagonal", rep.max_offdiagonal},
                    {"c13_minus_c12", rep.c13_minus_c12},
                    {"c13_minus_c14", rep.c13_minus_c14},
                    {"c12_minus_c14", rep.c12_minus_c14},
                    {"sign_pattern_ok", rep.sign_pattern_ok},
                    {"monotonicity_ok", rep.monotonicity_ok}};
  write_json_file(dir + "/capacitance.json", j);
  return 0;
}

int cmd_bands(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  Workspace ws(cfg);
  std::vector<Vec2> corners;
  for (const std::string& name : split(cfg.path.points, ','))
    corners.push_back(corner_by_name(name, ws.hs));
  std::vector<double> params;
  const std::vector<Vec2> alphas = make_path(corners, cfg.path.samples, &params);
  const std::vector<BandSample> samples =
      sample_band_path(alphas, params, ws.mesh, ws.green, cfg.materials, threads);

  std::vector<std::string> cols = {"alpha_x", "alpha_y", "path_parameter"};
  for (int n = 1; n <= ws.layout.count(); ++n) cols.push_back("omega_" + std::to_string(n));
  cols.push_back("source");
  std::vector<std::vector<std::string>> rows;
  for (const BandSample& s : samples) {
    std::vector<std::string> row = {format_number(s.alpha.x()), format_number(s.alpha.y()),
                                    format_number(s.path_parameter)};
    for (double w : s.omegas) row.push_back(format_number(w));
    row.push_back(s.source == BandSource::Capacitance ? "capacitance" : "bie-roots");
    rows.push_back(row);
  }
  write_csv(dir + "/bands.csv", csv_header(cfg), cols, rows);

  json j = config_meta(cfg);
  j["samples"] = samples.size();
  j["path"] = cfg.path.points;
  j["contrast_warning"] = cfg.materials.contrast_warning();
  write_json_file(dir + "/bands.json", j);
  return 0;
}

int cmd_cone(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  Workspace ws(cfg);
  const double k1 = ws.basis.k1.norm();
  json j = config_meta(cfg);

  if (cfg.cone.subcell) {
    if (cfg.geometry.sigma != 0.0)
      throw std::runtime_error("the sub-cell cone requires sigma = 0");
    const InclusionLayout sub = build_inclusions(cfg.geometry.radius, 0.0, CellVariant::SubCell);
    const BoundaryMesh submesh = discretize(sub, cfg.discretization.nodes_per_circle);
    const LatticeGreen subgreen(sublattice(ws.basis),
                                {cfg.discretization.ewald_split, 1, 1,
                                 cfg.discretization.lattice_tol});
    const double kt = subgreen.basis().k1.norm();
    const ConeFit lower = fit_dirac_cone(ws.hs.alpha1, cfg.cone.directions,
                                         cfg.cone.t_min_frac * kt, cfg.cone.t_max_frac * kt,
                                         cfg.cone.radii, {0}, submesh, subgreen,
                                         cfg.materials, threads);
    const ConeFit upper = fit_dirac_cone(ws.hs.alpha1, cfg.cone.directions,
                                         cfg.cone.t_min_frac * kt, cfg.cone.t_max_frac * kt,
                                         cfg.cone.radii, {1}, submesh, subgreen,
                                         cfg.materials, threads);
    j["center"] = "K1";
    j["lower"] = fit_to_json(lower);
    j["upper"] = fit_to_json(upper);
    j["slope_mismatch"] =
        std::abs(lower.slope - upper.slope) / std::max(lower.slope, upper.slope);
  } else {
    if (cfg.geometry.sigma != 0.0)
      throw std::runtime_error("the double Dirac cone at Gamma requires sigma = 0");
    const ConeFit lower =
        fit_dirac_cone(ws.hs.gamma, cfg.cone.directions, cfg.cone.t_min_frac * k1,
                       cfg.cone.t_max_frac * k1, cfg.cone.radii, {1, 2}, ws.mesh, ws.green,
                       cfg.materials, threads);
    const ConeFit upper =
        fit_dirac_cone(ws.hs.gamma, cfg.cone.directions, cfg.cone.t_min_frac * k1,
                       cfg.cone.t_max_frac * k1, cfg.cone.radii, {3, 4}, ws.mesh, ws.green,
                       cfg.materials, threads);
    j["center"] = "Gamma";
    j["lower"] = fit_to_json(lower);
    j["upper"] = fit_to_json(upper);
    j["omega_star_shared_dev"] = std::abs(lower.omega_star - upper.omega_star) /
                                 std::max(lower.omega_star, upper.omega_star);
  }
  write_json_file(dir + "/cone.json", j);
  return 0;
}

std::vector<Vec2> gamma_neighborhood(const HighSymmetryPoints& hs, const LatticeBasis& basis,
                                     double radius_frac, int directions, int radii) {
  std::vector<Vec2> alphas = {hs.gamma};
  const double k1 = basis.k1.norm();
  for (int d = 0; d < directions; ++d) {
    const double angle = 2.0 * kPi * d / directions + 0.13;
    for (int s = 1; s <= radii; ++s) {
      const double t = radius_frac * k1 * s / radii;
      alphas.push_back(t * Vec2(std::cos(angle), std::sin(angle)));
    }
  }
  return alphas;
}

int cmd_gap(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  Workspace ws(cfg);
  const std::vector<Vec2> alphas =
      gamma_neighborhood(ws.hs, ws.basis, cfg.gap.radius_frac, cfg.gap.directions,
                         cfg.gap.radii);
  const std::vector<BandSample> samples =
      sample_band_path(alphas, {}, ws.mesh, ws.green, cfg.materials, threads);
  const double gap = local_gap(samples, 2, 3);

  double max_lower = 0.0, min_upper = 1e300;
  for (const BandSample& s : samples) {
    max_lower = std::max(max_lower, s.omegas[2]);
    min_upper = std::min(min_upper, s.omegas[3]);
  }
  json j = config_meta(cfg);
  j["sigma"] = cfg.geometry.sigma;
  j["deformation"] = ws.layout.deformation_label();
  j["gap"] = gap;
  j["max_omega3"] = max_lower;
  j["min_omega4"] = min_upper;
  j["samples"] = samples.size();
  write_json_file(dir + "/gap.json", j);
  return 0;
}

int cmd_fold(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  (void)threads;
  if (cfg.geometry.sigma != 0.0)
    throw std::runtime_error(
        "folding requires the sigma = 0 super honeycomb layout; the sub-lattice "
        "translation symmetry fails for deformed inclusions");
  Workspace ws(cfg);
  const InclusionLayout sub = build_inclusions(cfg.geometry.radius, 0.0, CellVariant::SubCell);
  const BoundaryMesh submesh = discretize(sub, cfg.discretization.nodes_per_circle);
  const LatticeGreen subgreen(sublattice(ws.basis), {cfg.discretization.ewald_split, 1, 1,
                                                     cfg.discretization.lattice_tol});

  const std::vector<Vec2> probes = folding_probes(ws.layout, cfg.fold.probes);
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double residual0 = 0.0, residual_eps = 0.0, residual_omega = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    Density phi(ws.mesh.total_nodes());
    for (int i = 0; i < phi.size(); ++i) phi[i] = Complex(uni(rng), uni(rng));
    phi = project_mean_zero(phi, ws.mesh);
    const Vec2 eps = cfg.fold.epsilon_frac * ws.basis.k1;
    residual0 = std::max(residual0, verify_folding_identity(phi, ws.mesh, ws.green, submesh,
                                                            subgreen, Vec2::Zero(), 0.0,
                                                            probes));
    residual_eps = std::max(residual_eps,
                            verify_folding_identity(phi, ws.mesh, ws.green, submesh, subgreen,
                                                    eps, 0.0, probes));
    if (cfg.fold.omega > 0.0)
      residual_omega = std::max(
          residual_omega, verify_folding_identity(phi, ws.mesh, ws.green, submesh, subgreen,
                                                  eps, cfg.fold.omega, probes));
  }

  const FoldedSpectrumReport spec_rep = folded_spectrum_check(
      cfg.geometry.radius, cfg.discretization.nodes_per_circle,
      {cfg.discretization.ewald_split, 1, 1, cfg.discretization.lattice_tol});

  bool partition_ok = true;
  for (int n1 = -10; n1 <= 10 && partition_ok; ++n1) {
    for (int n2 = -10; n2 <= 10 && partition_ok; ++n2) {
      const DualClass d = classify_dual(n1, n2);
      const int o1 = d.cls == 1 ? 1 : 0;
      const int o2 = d.cls == 2 ? 1 : 0;
      partition_ok = (2 * d.m1 - d.m2 + o1 == n1) && (2 * d.m2 - d.m1 + o2 == n2);
    }
  }

  json j = config_meta(cfg);
  j["identity_residual_periodic"] = residual0;
  j["identity_residual_quasi"] = residual_eps;
  if (cfg.fold.omega > 0.0) j["identity_residual_helmholtz"] = residual_omega;
  j["probes"] = probes.size();
  j["multiset_deviation"] = spec_rep.multiset_deviation;
  j["kpoint_pair_deviation"] = spec_rep.kpoint_pair_deviation;
  j["gamma_zero_eigenvalue"] = spec_rep.gamma_zero_eigenvalue;
  j["full_spectrum"] = std::vector<double>(spec_rep.full_spectrum.data(),
                                           spec_rep.full_spectrum.data() + 6);
  j["subcell_union"] = std::vector<double>(spec_rep.subcell_union.data(),
                                           spec_rep.subcell_union.data() + 6);
  j["dual_partition_exact"] = partition_ok;
  write_json_file(dir + "/fold.json", j);
  return 0;
}

int cmd_fields(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  Workspace ws(cfg);
  const CapacitanceSolution sol = periodic_capacitance(ws.mesh, ws.green);
  const EigenDecomposition eig = eigen_decomposition(sol.matrix);

  json j = config_meta(cfg);
  j["sigma"] = cfg.geometry.sigma;
  j["deformation"] = ws.layout.deformation_label();
  j["eigenvalues"] = std::vector<double>(eig.values.data(), eig.values.data() + 6);

  for (int band = 2; band <= 5; ++band) {
    const FieldGrid grid =
        synthesize_eigenfunction(eig.vectors.col(band - 1), sol.densities, ws.mesh, ws.green,
                                 cfg.discretization.grid_points, threads);
    const ParityReport parity = parity_classify(grid);
    j["parity"]["band_" + std::to_string(band)] = {{"even_score", parity.even_score},
                                                   {"odd_score", parity.odd_score},
                                                   {"verdict", parity.verdict}};
    std::vector<std::vector<std::string>> rows;
    for (int gy = 0; gy < grid.ny; ++gy) {
      for (int gx = 0; gx < grid.nx; ++gx) {
        const Vec2 p = grid.point(gx, gy);
        const Complex v = grid.values[gy * grid.nx + gx];
        rows.push_back({format_number(p.x()), format_number(p.y()), format_number(v.real()),
                        format_number(v.imag()), std::to_string(grid.mask[gy * grid.nx + gx])});
      }
    }
    write_csv(dir + "/field_band" + std::to_string(band) + ".csv", csv_header(cfg),
              {"x", "y", "re", "im", "mask"}, rows);
  }

  if (cfg.geometry.sigma != 0.0) {
    const SpanCheck span = eigenvector_span_check(eig, cfg.geometry.sigma);
    j["span_angles"] = {{"bands_23", span.angle_23}, {"bands_45", span.angle_45}};
  }
  write_json_file(dir + "/fields.json", j);
  return 0;
}

int cmd_dispersion(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  Workspace ws(cfg);
  const int n_disp = cfg.dispersion.nodes_per_circle > 0 ? cfg.dispersion.nodes_per_circle
                                                         : cfg.discretization.nodes_per_circle;
  const BoundaryMesh mesh_disp = discretize(ws.layout, n_disp);
  const LatticeGreen green_disp(ws.basis, {cfg.discretization.ewald_split, 1, 1, 1e-9});

  std::vector<Vec2> alphas = {ws.hs.gamma};
  for (const std::string& tok : split(cfg.dispersion.alphas, ';')) {
    if (tok.empty()) continue;
    const auto parts = split(tok, ',');
    if (parts.size() != 2)
      throw std::runtime_error("dispersion.alphas entries must be 's,t' fractions");
    alphas.push_back(std::stod(parts[0]) * ws.basis.k1 + std::stod(parts[1]) * ws.basis.k2);
  }

  json j = config_meta(cfg);
  std::vector<std::string> cols = {"alpha_x", "alpha_y", "omega",
                                   "multiplicity", "near_resonance", "nearest_asymptotic",
                                   "relative_deviation"};
  std::vector<std::vector<std::string>> rows;

  for (const Vec2& alpha : alphas) {
    // asymptotic window from the capacitance bands at this alpha
    const std::vector<BandSample> ref =
        sample_band_path({alpha}, {}, ws.mesh, ws.green, cfg.materials, 1);
    const std::vector<double>& asym = ref[0].omegas;
    double lo = cfg.dispersion.omega_lo, hi = cfg.dispersion.omega_hi;
    if (lo <= 0.0 || hi <= lo) {
      lo = 0.55 * asym[1];
      hi = 1.15 * asym[5];
    }
    const DispersionResult res =
        dispersion_roots(mesh_disp, green_disp, alpha, cfg.materials, lo, hi,
                         cfg.dispersion.grid_points, cfg.dispersion.threshold, threads);
    for (size_t i = 0; i < res.roots.size(); ++i) {
      double best = 0.0, dev = 1e300;
      for (double w : asym) {
        if (w <= 0.0) continue;
        const double rel = std::abs(res.roots[i] - w) / w;
        if (rel < dev) {
          dev = rel;
          best = w;
        }
      }
      rows.push_back({format_number(alpha.x()), format_number(alpha.y()),
                      format_number(res.roots[i]), std::to_string(res.multiplicities[i]),
                      res.near_resonance[i] ? "1" : "0", format_number(best),
                      format_number(dev)});
    }
  }
  write_csv(dir + "/dispersion.csv", csv_header(cfg), cols, rows);
  j["alphas"] = alphas.size();
  j["contrast_warning"] = cfg.materials.contrast_warning();
  write_json_file(dir + "/dispersion.json", j);
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg, const std::string& dir, int threads) {
  const std::vector<CriterionResult> results = run_acceptance(threads);
  bool all = true;
  json j = config_meta(cfg);
  j["criteria"] = json::array();
  for (const CriterionResult& r : results) {
    all = all && r.passed;
    j["criteria"].push_back({{"id", r.id},
                             {"name", r.name},
                             {"passed", r.passed},
                             {"detail", r.detail},
                             {"seconds", r.seconds}});
  }
  j["all_passed"] = all;
  write_json_file(dir + "/validate.json", j);
  return all ? 0 : 1;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg,
                const std::string& out_root, int threads) {
  const std::string dir = artifact_dir(out_root, command, cfg);
  try {
    if (command == "capacitance") return cmd_capacitance(cfg, dir, threads);
    if (command == "bands") return cmd_bands(cfg, dir, threads);
    if (command == "cone") return cmd_cone(cfg, dir, threads);
    if (command == "gap") return cmd_gap(cfg, dir, threads);
    if (command == "fold") return cmd_fold(cfg, dir, threads);
    if (command == "fields") return cmd_fields(cfg, dir, threads);
    if (command == "dispersion") return cmd_dispersion(cfg, dir, threads);
    if (command == "validate") return cmd_validate(cfg, dir, threads);
    throw std::runtime_error("unknown command: " + command);
  } catch (const std::exception& e) {
    json err;
    err["command"] = command;
    err["config_hash"] = cfg.hash();
    err["error"] = e.what();
    write_json_file(dir + "/error.json", err);
    return 2;
  }
}

}  // namespace hexband
