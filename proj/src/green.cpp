#include "hexband/green.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hexband {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr int kMaxSpectralRings = 128;
constexpr int kMaxSpatialRings = 64;
constexpr int kMaxKummerRings = 512;

// E_1(z) for z > 0.
inline double exp_int1(double z) { return -std::expint(-z); }

// Visits integer pairs with max(|i|,|j|) == ring.
template <typename F>
void for_ring(int ring, F&& f) {
  if (ring == 0) {
    f(0, 0);
    return;
  }
  for (int i = -ring; i <= ring; ++i) {
    f(i, ring);
    f(i, -ring);
  }
  for (int j = -ring + 1; j <= ring - 1; ++j) {
    f(ring, j);
    f(-ring, j);
  }
}

}  // namespace

LatticeGreen::LatticeGreen(const LatticeBasis& basis, LatticeSumParams params)
    : basis_(basis), params_(params) {
  if (params_.spectral_cutoff < 1 || params_.spatial_cutoff < 1)
    throw std::invalid_argument("lattice-sum ring cutoffs must be >= 1");
  if (!(params_.abs_tol > 0.0))
    throw std::invalid_argument("lattice-sum abs_tol must be positive");
  eta_ = params_.ewald_split > 0.0 ? params_.ewald_split
                                   : std::sqrt(kPi) / std::sqrt(basis_.cell_area);
  min_dual_ = std::min(basis_.k1.norm(), basis_.k2.norm());
  min_dual_ = std::min(min_dual_, (basis_.k1 + basis_.k2).norm());
  min_dual_ = std::min(min_dual_, (basis_.k1 - basis_.k2).norm());
}

LatticeGreen::Reduced LatticeGreen::reduce(const Vec2& x, const Vec2& alpha) const {
  const Vec2 frac = basis_.fractional(x);
  const int n1 = static_cast<int>(std::lround(frac[0]));
  const int n2 = static_cast<int>(std::lround(frac[1]));
  Vec2 shift = Vec2::Zero();
  double best = x.norm();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Vec2 l = basis_.lattice_point(n1 + i, n2 + j);
      const double d = (x - l).norm();
      if (d < best) {
        best = d;
        shift = l;
      }
    }
  }
  return {x - shift, std::exp(kI * alpha.dot(shift))};
}

GreensEval LatticeGreen::laplace(const Vec2& x, const Vec2& alpha) const {
  const Reduced red = reduce(x, alpha);
  if (red.x.norm() < 1e-12)
    throw std::invalid_argument("green_laplace: x is on the lattice");
  GreensEval g = laplace_reduced(red.x, alpha, /*subtract_log=*/false);
  g.value *= red.phase;
  g.gradient *= red.phase;
  return g;
}

GreensEval LatticeGreen::laplace_regular(const Vec2& x, const Vec2& alpha) const {
  if (x.norm() >= 0.5 * std::sqrt(basis_.cell_area / (0.5 * std::sqrt(3.0))))
    throw std::invalid_argument("green_laplace_regular: |x| must be < half the lattice spacing");
  return laplace_reduced(x, alpha, /*subtract_log=*/true);
}

GreensEval LatticeGreen::laplace_reduced(const Vec2& x, const Vec2& alpha,
                                         bool subtract_log) const {
  const bool periodic = alpha.norm() < 1e-14;
  const double inv_area = 1.0 / basis_.cell_area;
  const double four_eta2 = 4.0 * eta_ * eta_;
  const double tol = params_.abs_tol / 10.0;

  GreensEval g;

  // Reciprocal sum with Gaussian screening.
  int quiet = 0;
  for (int ring = 0; ring <= kMaxSpectralRings; ++ring) {
    double ring_max = 0.0;
    for_ring(ring, [&](int i, int j) {
      const Vec2 beta = alpha + basis_.dual_point(i, j);
      const double b2 = beta.squaredNorm();
      if (b2 < 1e-24) {
        if (periodic) return;  // q = 0 mode excluded from G^{0,0}
        throw std::invalid_argument("green_laplace: alpha + q vanishes on the dual lattice");
      }
      const double coeff = -inv_area * std::exp(-b2 / four_eta2) / b2;
      const Complex e = coeff * std::polar(1.0, beta.dot(x));
      g.value += e;
      g.gradient += (kI * e) * beta;
      ring_max = std::max(ring_max, std::abs(coeff));
    });
    if (ring >= params_.spectral_cutoff && ring_max < tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (ring == kMaxSpectralRings)
      throw std::runtime_error("green_laplace: reciprocal Ewald sum did not converge");
  }

  // Real-space image sum.
  quiet = 0;
  for (int ring = 0; ring <= kMaxSpatialRings; ++ring) {
    double ring_max = 0.0;
    for_ring(ring, [&](int i, int j) {
      const Vec2 n = basis_.lattice_point(i, j);
      const Vec2 d = x - n;
      const double d2 = d.squaredNorm();
      const double z = eta_ * eta_ * d2;
      if (subtract_log && i == 0 && j == 0) {
        // Smooth remainder -E_1(eta^2 |x|^2)/4pi - log|x|/2pi of the origin image.
        if (d2 < 1e-28) {
          g.value += (kEulerGamma + 2.0 * std::log(eta_)) / (4.0 * kPi);
        } else {
          g.value += -exp_int1(z) / (4.0 * kPi) - std::log(d2) / (4.0 * kPi);
          g.gradient += Complex(std::expm1(-z) / (2.0 * kPi * d2)) * d;
        }
        ring_max = std::max(ring_max, 1.0);
        return;
      }
      if (z > 700.0) return;
      const double e1 = exp_int1(z);
      const Complex phase = periodic ? Complex(1.0) : std::polar(1.0, alpha.dot(n));
      g.value += -phase * e1 / (4.0 * kPi);
      g.gradient += (phase * (std::exp(-z) / (2.0 * kPi * d2))) * d;
      ring_max = std::max(ring_max, e1 / (4.0 * kPi));
    });
    if (ring >= params_.spatial_cutoff && ring_max < tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (ring == kMaxSpatialRings)
      throw std::runtime_error("green_laplace: real-space Ewald sum did not converge");
  }

  // Compensation for the excluded q = 0 mode of the screened split.
  if (periodic) g.value += inv_area / four_eta2;
  return g;
}

// Ewald evaluation of the absolutely convergent sums
//   T_p(x) = (1/|Y|) sum_{beta = alpha+q != 0} exp(i beta.x) / |beta|^{2p}
// for p = 2, 3. The screened reciprocal tail carries the truncated Taylor
// factor sum_{m<p} s^m/m! at s = |beta|^2/(4 eta^2); the image part uses the
// generalized exponential integrals E_p.
GreensEval LatticeGreen::inverse_power_sum(const Vec2& x, const Vec2& alpha, int p) const {
  const bool periodic = alpha.norm() < 1e-14;
  const double inv_area = 1.0 / basis_.cell_area;
  const double four_eta2 = 4.0 * eta_ * eta_;
  const double tol = params_.abs_tol / 10.0;

  GreensEval g;
  int quiet = 0;
  for (int ring = 0; ring <= kMaxSpectralRings; ++ring) {
    double ring_max = 0.0;
    for_ring(ring, [&](int i, int j) {
      const Vec2 beta = alpha + basis_.dual_point(i, j);
      const double b2 = beta.squaredNorm();
      if (b2 < 1e-24) {
        if (periodic) return;
        throw std::invalid_argument("lattice sum: alpha + q vanishes on the dual lattice");
      }
      const double s = b2 / four_eta2;
      const double taylor = p == 2 ? 1.0 + s : 1.0 + s + 0.5 * s * s;
      const double coeff =
          inv_area * std::exp(-s) * taylor / (p == 2 ? b2 * b2 : b2 * b2 * b2);
      const Complex e = coeff * std::polar(1.0, beta.dot(x));
      g.value += e;
      g.gradient += (kI * e) * beta;
      ring_max = std::max(ring_max, std::abs(coeff));
    });
    if (ring >= params_.spectral_cutoff && ring_max < tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (ring == kMaxSpectralRings)
      throw std::runtime_error("lattice sum: reciprocal part did not converge");
  }

  const double head2 = 16.0 * kPi * eta_ * eta_;                    // E2 / head2
  const double head3 = 128.0 * kPi * eta_ * eta_ * eta_ * eta_;     // E3 / head3
  quiet = 0;
  for (int ring = 0; ring <= kMaxSpatialRings; ++ring) {
    double ring_max = 0.0;
    for_ring(ring, [&](int i, int j) {
      const Vec2 n = basis_.lattice_point(i, j);
      const Vec2 d = x - n;
      const double d2 = d.squaredNorm();
      const double z = eta_ * eta_ * d2;
      if (z > 700.0) return;
      const Complex phase = periodic ? Complex(1.0) : std::polar(1.0, alpha.dot(n));
      double e1 = 0.0, e2 = 1.0, e3 = 0.5;
      if (z > 1e-300) {
        e1 = exp_int1(z);
        const double ez = std::exp(-z);
        e2 = ez - z * e1;
        e3 = 0.5 * (ez - z * e2);
      }
      if (p == 2) {
        g.value += phase * e2 / head2;
        if (d2 > 1e-28) g.gradient += (phase * (-e1 / (8.0 * kPi))) * d;
        ring_max = std::max(ring_max, e2 / head2);
      } else {
        g.value += phase * e3 / head3;
        if (d2 > 1e-28)
          g.gradient += (phase * (-e2 / (64.0 * kPi * eta_ * eta_))) * d;
        ring_max = std::max(ring_max, e3 / head3);
      }
    });
    if (ring >= params_.spatial_cutoff && ring_max < tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (ring == kMaxSpatialRings)
      throw std::runtime_error("lattice sum: image part did not converge");
  }

  // compensation for the excluded q = 0 head when alpha = 0
  if (periodic) {
    const double a = 1.0 / four_eta2;
    g.value -= inv_area * (p == 2 ? 0.5 * a * a : a * a * a / 6.0);
  }
  return g;
}

GreensEval LatticeGreen::tail_reduced(const Vec2& x, const Vec2& alpha, double omega) const {
  const bool periodic = alpha.norm() < 1e-14;
  const double inv_area = 1.0 / basis_.cell_area;
  const double w2 = omega * omega;
  const double w6 = w2 * w2 * w2;
  const double tol = params_.abs_tol / 10.0;

  GreensEval g;
  int quiet = 0;
  for (int ring = 0; ring <= kMaxKummerRings; ++ring) {
    double ring_max = 0.0;
    for_ring(ring, [&](int i, int j) {
      const Vec2 beta = alpha + basis_.dual_point(i, j);
      const double b2 = beta.squaredNorm();
      if (b2 < 1e-24) {
        if (periodic) return;  // restored separately below
        throw std::invalid_argument("helmholtz_correction: alpha + q vanishes");
      }
      const double den = w2 - b2;
      if (std::abs(den) < 1e-12)
        throw std::runtime_error("helmholtz_correction: omega resonates with |alpha+q|");
      const double coeff = inv_area * w6 / (den * b2 * b2 * b2);
      const Complex e = coeff * std::polar(1.0, beta.dot(x));
      g.value += e;
      g.gradient += (kI * e) * beta;
      ring_max = std::max(ring_max, std::abs(coeff));
    });
    const double ring_min_beta = ring * min_dual_ - alpha.norm();
    if (ring_min_beta > 2.0 * std::abs(omega) && ring_max < tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (ring == kMaxKummerRings)
      throw std::runtime_error("helmholtz_correction: Kummer series did not converge");
  }

  // The q = 0 mode is present in G^{0,w} but absent from G^{0,0}.
  if (periodic) g.value += inv_area / w2;
  return g;
}

GreensEval LatticeGreen::power_sum(const Vec2& x, const Vec2& alpha, int p) const {
  if (p != 2 && p != 3) throw std::invalid_argument("power_sum: p must be 2 or 3");
  const Reduced red = reduce(x, alpha);
  GreensEval g = inverse_power_sum(red.x, alpha, p);
  g.value *= red.phase;
  g.gradient *= red.phase;
  return g;
}

GreensEval LatticeGreen::helmholtz_tail(const Vec2& x, const Vec2& alpha, double omega) const {
  const Reduced red = reduce(x, alpha);
  GreensEval g = tail_reduced(red.x, alpha, omega);
  g.value *= red.phase;
  g.gradient *= red.phase;
  return g;
}

GreensEval LatticeGreen::helmholtz_correction(const Vec2& x, const Vec2& alpha,
                                              double omega) const {
  GreensEval g;
  if (omega == 0.0) return g;
  const Reduced red = reduce(x, alpha);
  const double w2 = omega * omega;
  const double w4 = w2 * w2;

  // w^2/((w^2-b^2) b^2) = -w^2/b^4 - w^4/b^6 + w^6/((w^2-b^2) b^6): the two
  // omega-independent sums go through Ewald, the w^6 tail decays like |q|^-8.
  const GreensEval t2 = inverse_power_sum(red.x, alpha, 2);
  const GreensEval t4 = inverse_power_sum(red.x, alpha, 3);
  const GreensEval tail = tail_reduced(red.x, alpha, omega);
  g.value = -w2 * t2.value - w4 * t4.value + tail.value;
  g.gradient = -w2 * t2.gradient - w4 * t4.gradient + tail.gradient;

  g.value *= red.phase;
  g.gradient *= red.phase;
  return g;
}

GreensEval LatticeGreen::helmholtz(const Vec2& x, const Vec2& alpha, double omega) const {
  GreensEval g = laplace(x, alpha);
  if (omega != 0.0) {
    const GreensEval c = helmholtz_correction(x, alpha, omega);
    g.value += c.value;
    g.gradient += c.gradient;
  }
  return g;
}

Complex LatticeGreen::direct_sum(const Vec2& x, const Vec2& alpha, double omega,
                                 int shell_count, double* tail_estimate) const {
  if (shell_count < 4) throw std::invalid_argument("direct_sum: shell_count must be >= 4");
  const bool static_periodic = alpha.norm() < 1e-14 && omega == 0.0;
  const double inv_area = 1.0 / basis_.cell_area;
  const double w2 = omega * omega;

  // |i k1 + j k2| >= 2 pi max(|i|/|l1|, |j|/|l2|), so this box covers every
  // dual point inside the outermost shell.
  const double lmax = std::max(basis_.l1.norm(), basis_.l2.norm());
  const int box = static_cast<int>(std::ceil(shell_count * min_dual_ * lmax / (2.0 * kPi))) + 1;
  std::vector<Complex> shell_sum(shell_count + 1, Complex(0.0));
  for (int i = -box; i <= box; ++i) {
    for (int j = -box; j <= box; ++j) {
      const Vec2 q = basis_.dual_point(i, j);
      const int shell = static_cast<int>(std::floor(q.norm() / min_dual_ + 1e-9));
      if (shell > shell_count) continue;
      if (i == 0 && j == 0 && static_periodic) continue;
      const Vec2 beta = alpha + q;
      const double den = w2 - beta.squaredNorm();
      if (std::abs(den) < 1e-12)
        throw std::runtime_error("direct_sum: omega resonates with |alpha+q|");
      shell_sum[shell] += inv_area * std::polar(1.0, beta.dot(x)) / den;
    }
  }

  // Partial sums oscillate as shells are added; average the trailing window.
  std::vector<Complex> partial(shell_count + 1);
  Complex acc(0.0);
  for (int s = 0; s <= shell_count; ++s) {
    acc += shell_sum[s];
    partial[s] = acc;
  }
  const int window = std::max(3, shell_count / 4);
  Complex mean(0.0);
  for (int s = shell_count - window + 1; s <= shell_count; ++s) mean += partial[s];
  mean /= double(window);
  double dev = 0.0;
  for (int s = shell_count - window + 1; s <= shell_count; ++s)
    dev = std::max(dev, std::abs(partial[s] - mean));
  if (tail_estimate) *tail_estimate = 3.0 * dev + std::abs(shell_sum[shell_count]);
  return mean;
}

}  // namespace hexband
