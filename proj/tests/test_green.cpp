#include <doctest.h>

#include <random>

#include "hexband/green.hpp"

using namespace hexband;

namespace {

const LatticeBasis kBasis = hex_lattice();

}  // namespace

TEST_CASE("ewald matches the shell-summed spectral series") {
  const LatticeGreen green(kBasis);

  // periodic case from the operation contract
  {
    const Vec2 x(0.1, 0.2);
    double tail = 0.0;
    const Complex direct = green.direct_sum(x, Vec2::Zero(), 0.0, 120, &tail);
    const Complex ewald = green.laplace(x, Vec2::Zero()).value;
    CHECK(std::abs(direct - ewald) < 1e-4);
    CHECK(std::abs(direct - ewald) < std::max(tail, 1e-6));
  }

  // a quasi-periodic Helmholtz case
  {
    const Vec2 x(0.12, -0.07);
    const Vec2 alpha = 0.31 * kBasis.k1 + 0.12 * kBasis.k2;
    const double omega = 0.7;
    const Complex direct = green.direct_sum(x, alpha, omega, 120, nullptr);
    const Complex ewald = green.helmholtz(x, alpha, omega).value;
    CHECK(std::abs(direct - ewald) < 1e-4);
  }
}

TEST_CASE("direct sum shell doubling stays within the reported tail") {
  const LatticeGreen green(kBasis);
  const Vec2 x(0.21, 0.05);
  const Vec2 alpha = 0.2 * kBasis.k1;
  double tail = 0.0;
  const Complex coarse = green.direct_sum(x, alpha, 0.0, 60, &tail);
  const Complex fine = green.direct_sum(x, alpha, 0.0, 120, nullptr);
  CHECK(std::abs(coarse - fine) < tail);

  // G^{0,0} is real by the Hermitian symmetry of the coefficients
  const Complex periodic = green.direct_sum(Vec2(0.25, 0.0), Vec2::Zero(), 0.0, 80, nullptr);
  CHECK(std::abs(periodic.imag()) < 1e-12);
}

TEST_CASE("quasi-periodicity under lattice translation") {
  const LatticeGreen green(kBasis);
  const Vec2 x(0.11, 0.21);
  const Vec2 alpha = 0.23 * kBasis.k1 - 0.14 * kBasis.k2;
  const GreensEval base = green.laplace(x, alpha);
  const GreensEval shifted = green.laplace(x + kBasis.l1, alpha);
  const Complex phase = std::exp(kI * alpha.dot(kBasis.l1));
  CHECK(std::abs(shifted.value - phase * base.value) < 1e-10);
  CHECK((shifted.gradient - phase * base.gradient).norm() < 1e-10);
}

TEST_CASE("ewald split-parameter invariance") {
  const Vec2 x(0.17, 0.13);
  const Vec2 alpha = 0.4 * kBasis.k1 + 0.1 * kBasis.k2;
  Complex ref(0.0);
  CVec2 ref_grad = CVec2::Zero();
  for (double eta : {1.0, 2.0, 4.0}) {
    const LatticeGreen green(kBasis, {eta, 1, 1, 1e-12});
    const GreensEval g = green.laplace(x, alpha);
    if (eta == 1.0) {
      ref = g.value;
      ref_grad = g.gradient;
    } else {
      CHECK(std::abs(g.value - ref) < 1e-10);
      CHECK((g.gradient - ref_grad).norm() < 1e-9);
    }
  }
}

TEST_CASE("regular part splits off the free-space log") {
  const LatticeGreen green(kBasis);
  const Vec2 alpha = 0.2 * kBasis.k1 + 0.3 * kBasis.k2;

  const Vec2 x(0.05, 0.05);
  const Complex full = green.laplace(x, alpha).value;
  const Complex reg = green.laplace_regular(x, alpha).value;
  CHECK(std::abs(reg + std::log(x.norm()) / (2.0 * kPi) - full) < 1e-10);

  // continuous at 0: extrapolated limit along three directions (linear-order
  // Richardson, R has a nonzero gradient at the origin)
  const Complex at0 = green.laplace_regular(Vec2::Zero(), alpha).value;
  for (double angle : {0.3, 1.7, 4.1}) {
    const Vec2 dir(std::cos(angle), std::sin(angle));
    const Complex v1 = green.laplace_regular(2e-5 * dir, alpha).value;
    const Complex v2 = green.laplace_regular(1e-5 * dir, alpha).value;
    const Complex limit = 2.0 * v2 - v1;
    CHECK(std::abs(limit - at0) < 1e-8);
  }

  CHECK_THROWS_AS(green.laplace_regular(Vec2(0.6, 0.0), alpha), std::invalid_argument);
}

TEST_CASE("helmholtz correction asymptotics") {
  const LatticeGreen green(kBasis);
  const Vec2 x(0.1, 0.1);

  // omega -> 0 at fixed alpha != 0: correction vanishes like omega^2
  const Vec2 alpha = 0.3 * kBasis.k1;
  const double c1 = std::abs(green.helmholtz_correction(x, alpha, 0.1).value);
  const double c2 = std::abs(green.helmholtz_correction(x, alpha, 0.05).value);
  CHECK(c2 < c1 / 3.0);
  CHECK(std::abs(green.helmholtz_correction(x, alpha, 0.0).value) == 0.0);

  // alpha = 0: correction - 1/(|Y| omega^2) stays bounded as omega -> 0
  for (double omega : {0.2, 0.1, 0.05}) {
    const Complex corr = green.helmholtz_correction(x, Vec2::Zero(), omega).value;
    const Complex rest = corr - 1.0 / (kBasis.cell_area * omega * omega);
    CHECK(std::abs(rest) < 1.0);
  }
}

TEST_CASE("helmholtz correction matches the literal difference series") {
  const LatticeGreen green(kBasis);
  const Vec2 x(0.1, 0.1);
  const Vec2 alpha = 0.3 * kBasis.k1;
  const double omega = 0.2;

  // literal Kummer partial sum over a big integer box
  const double w2 = omega * omega;
  Complex direct = 0.0;
  const int box = 220;
  for (int i = -box; i <= box; ++i) {
    for (int j = -box; j <= box; ++j) {
      const Vec2 beta = alpha + kBasis.dual_point(i, j);
      const double b2 = beta.squaredNorm();
      direct += w2 / ((w2 - b2) * b2) * std::polar(1.0, beta.dot(x));
    }
  }
  direct /= kBasis.cell_area;
  CHECK(std::abs(direct - green.helmholtz_correction(x, alpha, omega).value) < 1e-8);
}

TEST_CASE("conjugation and parity of the full kernel") {
  const LatticeGreen green(kBasis);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-0.4, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 x = uni(rng) * kBasis.l1 + uni(rng) * kBasis.l2;
    if (x.norm() < 0.03) continue;
    const Vec2 alpha = uni(rng) * kBasis.k1 + uni(rng) * kBasis.k2;
    const double omega = 0.3 + 0.2 * std::abs(uni(rng));
    const Complex at = green.helmholtz(x, alpha, omega).value;
    const Complex neg_alpha = green.helmholtz(x, -alpha, omega).value;
    const Complex neg_x = green.helmholtz(-x, alpha, omega).value;
    CHECK(std::abs(std::conj(at) - neg_alpha) < 1e-10);
    CHECK(std::abs(neg_x - neg_alpha) < 1e-10);
  }
}

TEST_CASE("gradients agree with central differences") {
  const LatticeGreen green(kBasis);
  const Vec2 alpha = 0.25 * kBasis.k1 + 0.15 * kBasis.k2;
  const double h = 1e-6;
  for (const Vec2& x : {Vec2(0.2, 0.1), Vec2(-0.15, 0.22), Vec2(0.05, -0.3)}) {
    for (double omega : {0.0, 0.45}) {
      const GreensEval g = green.helmholtz(x, alpha, omega);
      const Complex dx = (green.helmholtz(x + Vec2(h, 0), alpha, omega).value -
                          green.helmholtz(x - Vec2(h, 0), alpha, omega).value) /
                         (2.0 * h);
      const Complex dy = (green.helmholtz(x + Vec2(0, h), alpha, omega).value -
                          green.helmholtz(x - Vec2(0, h), alpha, omega).value) /
                         (2.0 * h);
      CHECK(std::abs(g.gradient[0] - dx) < 1e-5);
      CHECK(std::abs(g.gradient[1] - dy) < 1e-5);
    }
  }
}

TEST_CASE("singular and resonant inputs are rejected") {
  const LatticeGreen green(kBasis);
  CHECK_THROWS_AS(green.laplace(Vec2::Zero(), 0.1 * kBasis.k1), std::invalid_argument);
  CHECK_THROWS_AS(green.laplace(kBasis.l1, 0.1 * kBasis.k1), std::invalid_argument);
  // alpha on the dual lattice makes alpha + q vanish
  CHECK_THROWS_AS(green.laplace(Vec2(0.1, 0.1), kBasis.k1), std::invalid_argument);
  // omega equal to |alpha + q| resonates
  const Vec2 alpha = 0.2 * kBasis.k1;
  CHECK_THROWS_AS(green.helmholtz_correction(Vec2(0.1, 0.1), alpha, alpha.norm()),
                  std::runtime_error);
}
