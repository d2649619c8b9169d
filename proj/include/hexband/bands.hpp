#pragma once

#include <vector>

#include "hexband/capacitance.hpp"
#include "hexband/materials.hpp"

namespace hexband {

enum class BandSource { Capacitance, BieRoots };

struct BandSample {
  Vec2 alpha = Vec2::Zero();
  double path_parameter = 0.0;
  std::vector<double> omegas;  // ascending
  BandSource source = BandSource::Capacitance;
};

// omega_n = sqrt(m * delta * lambda_n * vb^2 / |D|) for the m-inclusion cell.
// Eigenvalues below -1e-10 (relative) are rejected; small negatives clamp to 0.
std::vector<double> asymptotic_bands(const Eigen::VectorXd& lambdas, const MaterialParams& mat,
                                     const InclusionLayout& layout);

// Straight-line path through the listed corner points with `samples` points in
// total; path_parameter is the normalized cumulative arc length in [0, 1].
std::vector<Vec2> make_path(const std::vector<Vec2>& corners, int samples,
                            std::vector<double>* parameters = nullptr);

// Quasi-periodic capacitance bands along a path; alpha = 0 entries are routed
// to the periodic solve. Parallel over samples.
std::vector<BandSample> sample_band_path(const std::vector<Vec2>& alphas,
                                         const std::vector<double>& parameters,
                                         const BoundaryMesh& mesh, const LatticeGreen& green,
                                         const MaterialParams& mat, int threads = 1);

struct ConeFit {
  double omega_star = 0.0;       // mean fitted vertex frequency
  double slope = 0.0;            // mean |d omega / d|alpha||, >= 0
  double slope_spread = 0.0;     // (max - min) / mean over directions
  double omega_star_spread = 0.0;
  double residual = 0.0;         // max per-direction rms residual / fitted range
  std::vector<double> direction_slopes;
  std::vector<double> direction_offsets;
  bool decreasing = false;       // branch runs downhill away from the center
};

// Least-squares linear fit omega(t) = omega* -/+ slope * t along `directions`
// rays from `center`, using the listed (0-based) band indices as one branch.
// Throws when the residual exceeds 10% of the fitted range.
ConeFit fit_dirac_cone(const Vec2& center, int directions, double t_min, double t_max,
                       int radii, const std::vector<int>& bands, const BoundaryMesh& mesh,
                       const LatticeGreen& green, const MaterialParams& mat, int threads = 1);

// max(0, min_a omega_upper - max_a omega_lower) over the samples.
double local_gap(const std::vector<BandSample>& samples, int lower_band, int upper_band);

struct DispersionResult {
  std::vector<double> roots;          // ascending characteristic values
  std::vector<int> multiplicities;    // singular values below the cluster cut
  std::vector<bool> near_resonance;   // root close to an empty-lattice line
  double operator_norm = 0.0;
  std::vector<double> scan_omega;
  std::vector<double> scan_smin;
};

// Scans the smallest singular value of the block operator over
// [omega_lo, omega_hi], refines each local minimum by golden section, and
// accepts roots with s_min < threshold * ||A||. An empty result is valid.
DispersionResult dispersion_roots(const BoundaryMesh& mesh, const LatticeGreen& green,
                                  const Vec2& alpha, const MaterialParams& mat,
                                  double omega_lo, double omega_hi, int grid_points = 200,
                                  double threshold = 1e-6, int threads = 1);

}  // namespace hexband
