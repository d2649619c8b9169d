#include "hexband/bands.hpp"

#include <algorithm>
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
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> bands_at(const Vec2& alpha, const BoundaryMesh& mesh,
                             const LatticeGreen& green, const MaterialParams& mat) {
  const double k1 = green.basis().k1.norm();
  EigenDecomposition eig;
  if (alpha.norm() < 1e-4 * k1) {
    eig = eigen_decomposition(periodic_capacitance(mesh, green).matrix);
  } else {
    eig = eigen_decomposition(quasiperiodic_capacitance(mesh, green, alpha));
  }
  return asymptotic_bands(eig.values, mat, mesh.layout);
}

}  // namespace

std::vector<double> asymptotic_bands(const Eigen::VectorXd& lambdas, const MaterialParams& mat,
                                     const InclusionLayout& layout) {
  mat.validate();
  const double prefactor =
      layout.count() * mat.delta() * mat.vb() * mat.vb() / layout.area();
  const double scale = std::max(1.0, lambdas.cwiseAbs().maxCoeff());
  std::vector<double> omegas;
  omegas.reserve(lambdas.size());
  for (int n = 0; n < lambdas.size(); ++n) {
    const double lam = lambdas(n);
    if (lam < -1e-10 * scale)
      throw std::runtime_error("asymptotic_bands: capacitance eigenvalue is negative");
    omegas.push_back(std::sqrt(prefactor * std::max(lam, 0.0)));
  }
  std::sort(omegas.begin(), omegas.end());
  return omegas;
}

std::vector<Vec2> make_path(const std::vector<Vec2>& corners, int samples,
                            std::vector<double>* parameters) {
  if (corners.size() < 2 || samples < 2)
    throw std::invalid_argument("make_path: need at least two corners and two samples");
  std::vector<double> cum{0.0};
  for (size_t i = 1; i < corners.size(); ++i)
    cum.push_back(cum.back() + (corners[i] - corners[i - 1]).norm());
  const double total = cum.back();
  if (!(total > 0.0)) throw std::invalid_argument("make_path: degenerate path");

  std::vector<Vec2> points;
  if (parameters) parameters->clear();
  for (int s = 0; s < samples; ++s) {
    const double arc = total * s / (samples - 1);
    size_t seg = 1;
    while (seg + 1 < cum.size() && arc > cum[seg]) ++seg;
    const double t = (arc - cum[seg - 1]) / std::max(cum[seg] - cum[seg - 1], 1e-300);
    points.push_back(corners[seg - 1] + t * (corners[seg] - corners[seg - 1]));
    if (parameters) parameters->push_back(arc / total);
  }
  return points;
}

std::vector<BandSample> sample_band_path(const std::vector<Vec2>& alphas,
                                         const std::vector<double>& parameters,
                                         const BoundaryMesh& mesh, const LatticeGreen& green,
                                         const MaterialParams& mat, int threads) {
  if (!parameters.empty() && parameters.size() != alphas.size())
    throw std::invalid_argument("sample_band_path: parameter list size mismatch");
  std::vector<BandSample> samples(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), threads, [&](int i) {
    samples[i].alpha = alphas[i];
    samples[i].path_parameter = parameters.empty() ? double(i) : parameters[i];
    samples[i].omegas = bands_at(alphas[i], mesh, green, mat);
    samples[i].source = BandSource::Capacitance;
  });
  return samples;
}

ConeFit fit_dirac_cone(const Vec2& center, int directions, double t_min, double t_max,
                       int radii, const std::vector<int>& bands, const BoundaryMesh& mesh,
                       const LatticeGreen& green, const MaterialParams& mat, int threads) {
  const double k1 = green.basis().k1.norm();
  if (directions < 3) throw std::invalid_argument("fit_dirac_cone: need >= 3 directions");
  if (!(0.0 < t_min && t_min < t_max && t_max <= 0.1 * k1))
    throw std::invalid_argument("fit_dirac_cone: radii must satisfy 0 < t_min < t_max <= 0.1|k1|");
  if (radii < 2 || bands.empty()) throw std::invalid_argument("fit_dirac_cone: bad sampling");

  // all (direction, radius) band evaluations, flattened for the thread pool
  std::vector<std::vector<double>> values(directions * radii);
  parallel_for(directions * radii, threads, [&](int idx) {
    const int d = idx / radii;
    const int s = idx % radii;
    const double angle = 2.0 * kPi * d / directions + 0.2;  // off the symmetry axes
    const double t = t_min + (t_max - t_min) * s / (radii - 1);
    const Vec2 alpha = center + t * Vec2(std::cos(angle), std::sin(angle));
    values[idx] = bands_at(alpha, mesh, green, mat);
  });

  ConeFit fit;
  double slope_min = 1e300, slope_max = -1e300;
  double star_min = 1e300, star_max = -1e300;
  for (int d = 0; d < directions; ++d) {
    // least squares omega = a + b t over all pair members
    double sw = 0, st = 0, stt = 0, sy = 0, sty = 0;
    for (int s = 0; s < radii; ++s) {
      const double t = t_min + (t_max - t_min) * s / (radii - 1);
      for (int band : bands) {
        const auto& om = values[d * radii + s];
        if (band < 0 || band >= static_cast<int>(om.size()))
          throw std::invalid_argument("fit_dirac_cone: band index out of range");
        sw += 1.0;
        st += t;
        stt += t * t;
        sy += om[band];
        sty += t * om[band];
      }
    }
    const double det = sw * stt - st * st;
    const double a = (stt * sy - st * sty) / det;
    const double b = (sw * sty - st * sy) / det;
    double rms = 0.0;
    for (int s = 0; s < radii; ++s) {
      const double t = t_min + (t_max - t_min) * s / (radii - 1);
      for (int band : bands) {
        const double r = values[d * radii + s][band] - (a + b * t);
        rms += r * r;
      }
    }
    rms = std::sqrt(rms / sw);
    const double range = std::abs(b) * (t_max - t_min);
    fit.residual = std::max(fit.residual, range > 0 ? rms / range : rms);
    fit.direction_slopes.push_back(std::abs(b));
    fit.direction_offsets.push_back(a);
    fit.omega_star += a;
    fit.slope += std::abs(b);
    slope_min = std::min(slope_min, std::abs(b));
    slope_max = std::max(slope_max, std::abs(b));
    star_min = std::min(star_min, a);
    star_max = std::max(star_max, a);
    if (d == 0) fit.decreasing = b < 0.0;
  }
  fit.omega_star /= directions;
  fit.slope /= directions;
  fit.slope_spread = fit.slope > 0 ? (slope_max - slope_min) / fit.slope : 0.0;
  fit.omega_star_spread = fit.omega_star > 0 ? (star_max - star_min) / fit.omega_star : 0.0;
  if (fit.residual > 0.10)
    throw std::runtime_error("fit_dirac_cone: linear fit residual exceeds 10% of the range");
  return fit;
}

double local_gap(const std::vector<BandSample>& samples, int lower_band, int upper_band) {
  if (samples.empty()) throw std::invalid_argument("local_gap: no samples");
  double max_lower = -1e300, min_upper = 1e300;
  for (const BandSample& s : samples) {
    if (upper_band >= static_cast<int>(s.omegas.size()) || lower_band < 0)
      throw std::invalid_argument("local_gap: band index out of range");
    max_lower = std::max(max_lower, s.omegas[lower_band]);
    min_upper = std::min(min_upper, s.omegas[upper_band]);
  }
  return std::max(0.0, min_upper - max_lower);
}

namespace {

// Smallest singular value via inverse iteration on (A^H A)^{-1} using one LU
// factorization; returns a tiny floor when A is numerically singular.
double smallest_singular_estimate(const Eigen::MatrixXcd& a, int iterations) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = Complex(std::cos(0.7 * i + 0.3), std::sin(1.3 * i + 0.1));
  v.normalize();
  double growth = 0.0;  // ||(A^H A)^{-1} v|| -> 1/sigma_min^2
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXcd y = lu.adjoint().solve(v);
    const Eigen::VectorXcd w = lu.solve(y);
    growth = w.norm();
    if (!(growth > 0.0) || !std::isfinite(growth)) return 1e-300;
    v = w / growth;
  }
  return 1.0 / std::sqrt(growth);
}

}  // namespace

DispersionResult dispersion_roots(const BoundaryMesh& mesh, const LatticeGreen& green,
                                  const Vec2& alpha, const MaterialParams& mat,
                                  double omega_lo, double omega_hi, int grid_points,
                                  double threshold, int threads) {
  if (!(0.0 < omega_lo && omega_lo < omega_hi))
    throw std::invalid_argument("dispersion_roots: bad omega window");
  if (grid_points < 8) throw std::invalid_argument("dispersion_roots: too few grid points");

  const LayerAssembler assembler(mesh, green, alpha);
  auto smin = [&](double omega) {
    return smallest_singular_estimate(assembler.block_a(omega, mat).m, 4);
  };

  DispersionResult result;
  result.scan_omega.resize(grid_points);
  result.scan_smin.resize(grid_points);
  parallel_for(grid_points, threads, [&](int i) {
    const double omega = omega_lo + (omega_hi - omega_lo) * i / (grid_points - 1);
    result.scan_omega[i] = omega;
    result.scan_smin[i] = smin(omega);
  });
  result.operator_norm =
      assembler.block_a(0.5 * (omega_lo + omega_hi), mat).m.norm();

  // Refine the interior local minima by golden section.
  const double gold = 0.5 * (std::sqrt(5.0) - 1.0);
  std::vector<double> candidates;
  for (int i = 1; i + 1 < grid_points; ++i) {
    if (result.scan_smin[i] <= result.scan_smin[i - 1] &&
        result.scan_smin[i] <= result.scan_smin[i + 1]) {
      double a = result.scan_omega[i - 1];
      double b = result.scan_omega[i + 1];
      double x1 = b - gold * (b - a);
      double x2 = a + gold * (b - a);
      double f1 = smin(x1), f2 = smin(x2);
      while (b - a > 1e-10 * std::abs(b)) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gold * (b - a);
          f1 = smin(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gold * (b - a);
          f2 = smin(x2);
        }
      }
      candidates.push_back(0.5 * (a + b));
    }
  }

  for (double root : candidates) {
    const Eigen::MatrixXcd a = assembler.block_a(root, mat).m;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    const Eigen::VectorXd sv = svd.singularValues();
    const double s_min = sv(sv.size() - 1);
    if (s_min >= threshold * result.operator_norm) continue;
    const double cluster_cut = std::max(1e-4 * result.operator_norm, 50.0 * s_min);
    int mult = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) < cluster_cut) ++mult;
    // distance to the empty-lattice resonance set omega = v0 |alpha + q|
    double res_dist = 1e300;
    for (int n1 = -4; n1 <= 4; ++n1)
      for (int n2 = -4; n2 <= 4; ++n2)
        res_dist = std::min(res_dist, std::abs(root - mat.v0() * (alpha + green.basis().dual_point(n1, n2)).norm()));
    result.roots.push_back(root);
    result.multiplicities.push_back(mult);
    result.near_resonance.push_back(res_dist < 0.01 * (omega_hi - omega_lo));
  }
  return result;
}

}  // namespace hexband
