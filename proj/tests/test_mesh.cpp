#include <doctest.h>

#include <random>

#include "hexband/mesh.hpp"

using namespace hexband;

TEST_CASE("discretization basics") {
  const InclusionLayout lay = build_inclusions(0.086, 0.0);
  const BoundaryMesh mesh = discretize(lay, 64);
  CHECK(mesh.total_nodes() == 384);
  CHECK(discretize(build_inclusions(0.086, 0.0, CellVariant::SubCell), 64).total_nodes() ==
        128);

  // weights sum to the circumference on every circle
  for (int c = 0; c < 6; ++c) {
    double sum = 0.0;
    for (int k = 0; k < 64; ++k) sum += mesh.weights[mesh.node_index(c, k)];
    CHECK(sum == doctest::Approx(2.0 * kPi * 0.086).epsilon(1e-14));
  }

  // outward unit normals
  for (int i = 0; i < mesh.total_nodes(); ++i) {
    CHECK(mesh.normals[i].norm() == doctest::Approx(1.0).epsilon(1e-15));
    const Vec2 center = lay.centers[mesh.circle_of(i)];
    CHECK(mesh.normals[i].dot(mesh.points[i] - center) > 0.0);
  }

  CHECK_THROWS_AS(discretize(lay, 7), std::invalid_argument);
  CHECK_THROWS_AS(discretize(lay, 6), std::invalid_argument);
}

TEST_CASE("meshes are bitwise deterministic") {
  const InclusionLayout lay = build_inclusions(0.086, -0.1);
  const BoundaryMesh a = discretize(lay, 32);
  const BoundaryMesh b = discretize(lay, 32);
  for (int i = 0; i < a.total_nodes(); ++i) {
    CHECK(a.points[i].x() == b.points[i].x());
    CHECK(a.points[i].y() == b.points[i].y());
  }
}

TEST_CASE("trapezoid quadrature is exact for low trigonometric modes") {
  const BoundaryMesh mesh = discretize(build_inclusions(0.086, 0.0), 32);
  for (int m = 1; m < 16; ++m) {
    Density d = Density::Zero(mesh.total_nodes());
    for (int k = 0; k < 32; ++k)
      d[mesh.node_index(2, k)] = std::polar(1.0, m * mesh.angles[k]);
    CHECK(std::abs(integrate(d, mesh, {2})) < 1e-13);
  }

  // constants integrate to the circumference
  CHECK(std::abs(integrate(indicator(1, mesh), mesh, {1}) - 2.0 * kPi * 0.086) < 1e-14);
  CHECK(std::abs(integrate(indicator(1, mesh), mesh) - 2.0 * kPi * 0.086) < 1e-14);
  CHECK_THROWS_AS(integrate(indicator(0, mesh), mesh, {7}), std::out_of_range);
}

TEST_CASE("refinement self-convergence of smooth quadrature") {
  const InclusionLayout lay = build_inclusions(0.086, 0.0);
  const BoundaryMesh coarse = discretize(lay, 64);
  const BoundaryMesh fine = discretize(lay, 128);
  auto smooth = [](double theta) {
    return std::exp(std::sin(theta)) * Complex(std::cos(2.0 * theta), std::sin(theta));
  };
  Density dc = Density::Zero(coarse.total_nodes());
  Density df = Density::Zero(fine.total_nodes());
  for (int k = 0; k < 64; ++k) dc[coarse.node_index(0, k)] = smooth(coarse.angles[k]);
  for (int k = 0; k < 128; ++k) df[fine.node_index(0, k)] = smooth(fine.angles[k]);
  CHECK(std::abs(integrate(dc, coarse, {0}) - integrate(df, fine, {0})) < 1e-12);
}

TEST_CASE("indicator and mean-zero projection") {
  const BoundaryMesh mesh = discretize(build_inclusions(0.086, 0.0), 16);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Density d(mesh.total_nodes());
  for (int i = 0; i < d.size(); ++i) d[i] = Complex(uni(rng), uni(rng));
  CHECK(std::abs(integrate(project_mean_zero(d, mesh), mesh)) < 1e-14);

  // equal perimeters make the projected indicator chi_1 - 1/6
  const Density proj = project_mean_zero(indicator(0, mesh), mesh);
  for (int i = 0; i < proj.size(); ++i) {
    const double expected = mesh.circle_of(i) == 0 ? 1.0 - 1.0 / 6.0 : -1.0 / 6.0;
    CHECK(std::abs(proj[i] - expected) < 1e-14);
  }
}
