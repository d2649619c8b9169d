#include <doctest.h>

#include "hexband/geometry.hpp"

using namespace hexband;

TEST_CASE("hex lattice basis and duality") {
  const LatticeBasis b = hex_lattice();
  CHECK(b.cell_area == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));

  // k_i . l_j = 2 pi delta_ij
  const double two_pi = 2.0 * kPi;
  CHECK(std::abs(b.k1.dot(b.l1) - two_pi) < 1e-14);
  CHECK(std::abs(b.k2.dot(b.l2) - two_pi) < 1e-14);
  CHECK(std::abs(b.k1.dot(b.l2)) < 1e-14);
  CHECK(std::abs(b.k2.dot(b.l1)) < 1e-14);

  CHECK((b.k1 - Vec2(two_pi, -two_pi / std::sqrt(3.0))).norm() < 1e-13);
  CHECK((b.k2 - Vec2(two_pi, two_pi / std::sqrt(3.0))).norm() < 1e-13);
}

TEST_CASE("sub-lattice basis") {
  const LatticeBasis b = hex_lattice();
  const LatticeBasis s = sublattice(b);
  CHECK(std::abs(s.k1.dot(s.l1) - 2.0 * kPi) < 1e-13);
  CHECK(std::abs(s.k1.dot(s.l2)) < 1e-13);
  CHECK(s.cell_area == doctest::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-14));
  CHECK((s.k1 - (2.0 * b.k1 - b.k2)).norm() < 1e-13);
  CHECK((s.k2 - (2.0 * b.k2 - b.k1)).norm() < 1e-13);
}

TEST_CASE("high symmetry points") {
  const LatticeBasis b = hex_lattice();
  const LatticeBasis s = sublattice(b);
  const HighSymmetryPoints p = high_symmetry_points(b);
  CHECK((p.alpha1 - b.k1).norm() < 1e-14);
  CHECK((p.m1 + p.m2).norm() < 1e-14);
  CHECK(((2.0 / 3.0) * s.k1 + (1.0 / 3.0) * s.k2 - b.k1).norm() < 1e-13);
  CHECK(((1.0 / 3.0) * s.k1 + (2.0 / 3.0) * s.k2 - b.k2).norm() < 1e-13);
}

TEST_CASE("symmetry matrices") {
  const Mat2 r = rotation_minus_60();
  Mat2 acc = Mat2::Identity();
  for (int i = 0; i < 6; ++i) acc = r * acc;
  CHECK((acc - Mat2::Identity()).norm() < 1e-14);
  CHECK((r * r.transpose() - Mat2::Identity()).norm() < 1e-15);
  CHECK((reflection_x() * reflection_x() - Mat2::Identity()).norm() == 0.0);
  CHECK((reflection_y() * reflection_y() - Mat2::Identity()).norm() == 0.0);
}

TEST_CASE("inclusion layout") {
  const InclusionLayout lay = build_inclusions(0.086, 0.0);
  REQUIRE(lay.count() == 6);
  for (const Vec2& c : lay.centers) CHECK(c.norm() == doctest::Approx(1.0 / 3.0));

  const InclusionLayout contracted = build_inclusions(0.086, -0.1);
  for (const Vec2& c : contracted.centers) CHECK(c.norm() == doctest::Approx(0.3));
  CHECK(contracted.deformation_label() == "contracted");
  CHECK(build_inclusions(0.086, 0.1).deformation_label() == "dilated");

  // c_j = R^{j-1} c_1
  const Mat2 r = rotation_minus_60();
  for (int j = 1; j < 6; ++j)
    CHECK((lay.centers[j] - r * lay.centers[j - 1]).norm() < 1e-15);

  CHECK_THROWS_AS(build_inclusions(0.13, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_inclusions(0.124, -0.9), std::invalid_argument);  // overlap at center
  CHECK_THROWS_AS(build_inclusions(0.086, 0.6), std::invalid_argument);   // leaves the cell
}

TEST_CASE("layout symmetry under rotation and reflection across sigma scan") {
  const Mat2 r = rotation_minus_60();
  const Mat2 ty = reflection_y();
  for (double sigma = -0.2; sigma <= 0.2001; sigma += 0.05) {
    const InclusionLayout lay = build_inclusions(0.086, sigma);
    for (const Mat2& op : {r, ty}) {
      for (const Vec2& c : lay.centers) {
        double best = 1e300;
        for (const Vec2& d : lay.centers) best = std::min(best, (op * c - d).norm());
        CHECK(best < 1e-14);
      }
    }
  }
}

TEST_CASE("minimum image distances at sigma = 0") {
  const LatticeBasis b = hex_lattice();
  const InclusionLayout lay = build_inclusions(0.086, 0.0);
  CHECK(min_image_distance(lay.centers[0], lay.centers[0], b) == 0.0);
  CHECK(min_image_distance(lay.centers[0], lay.centers[1], b) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // opposite disk is closest through a lattice image
  CHECK((lay.centers[0] - lay.centers[3]).norm() == doctest::Approx(2.0 / 3.0));
  CHECK(min_image_distance(lay.centers[0], lay.centers[3], b) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // honeycomb coordination: exactly three neighbours at distance 1/3
  for (int j = 0; j < 6; ++j) {
    int neighbours = 0;
    for (int k = 0; k < 6; ++k) {
      if (k == j) continue;
      if (std::abs(min_image_distance(lay.centers[j], lay.centers[k], b) - 1.0 / 3.0) < 1e-14)
        ++neighbours;
    }
    CHECK(neighbours == 3);
  }
}

TEST_CASE("sub-cell layout pairs with the sub-lattice") {
  const InclusionLayout sub = build_inclusions(0.086, 0.0, CellVariant::SubCell);
  REQUIRE(sub.count() == 2);
  const InclusionLayout full = build_inclusions(0.086, 0.0);
  CHECK((sub.centers[0] - full.centers[0]).norm() < 1e-15);
  CHECK((sub.centers[1] - full.centers[1]).norm() < 1e-15);
  CHECK_THROWS_AS(build_inclusions(0.086, 0.05, CellVariant::SubCell), std::invalid_argument);

  // sigma = 0 centers are invariant under sub-lattice translations mod Lambda
  const LatticeBasis b = hex_lattice();
  const LatticeBasis s = sublattice(b);
  for (const Vec2& c : full.centers) {
    double best = 1e300;
    for (const Vec2& d : full.centers)
      best = std::min(best, min_image_distance(c + s.l1, d, b));
    CHECK(best < 1e-14);
  }
}
