#pragma once

#include <vector>

#include "hexband/geometry.hpp"
#include "hexband/types.hpp"

namespace hexband {

// Periodic-trapezoidal Nystroem grid on the inclusion circles. Nodes are
// ordered circle-major, angle-minor; the layout is deterministic for given
// inputs. All circles share the radius and the node count N.
struct BoundaryMesh {
  InclusionLayout layout;
  int nodes_per_circle = 0;
  std::vector<double> angles;    // theta_k = 2 pi k / N, shared by all circles
  std::vector<Vec2> points;      // size circles * N
  std::vector<Vec2> normals;     // outward unit normals
  std::vector<double> weights;   // arc weights 2 pi r / N

  int circle_count() const { return layout.count(); }
  int total_nodes() const { return static_cast<int>(points.size()); }
  int node_index(int circle, int k) const { return circle * nodes_per_circle + k; }
  int circle_of(int node) const { return node / nodes_per_circle; }
  double curvature() const { return 1.0 / layout.radius; }
  double node_spacing() const { return 2.0 * kPi * layout.radius / nodes_per_circle; }
};

using Density = Eigen::VectorXcd;

// N must be even and >= 8.
BoundaryMesh discretize(const InclusionLayout& layout, int nodes_per_circle);

// Trapezoidal quadrature of d over the listed circles (all circles if empty).
Complex integrate(const Density& d, const BoundaryMesh& mesh,
                  const std::vector<int>& circles = {});

// Characteristic density of circle j.
Density indicator(int circle, const BoundaryMesh& mesh);

// Subtracts the quadrature mean so the result integrates to zero over the
// whole boundary.
Density project_mean_zero(const Density& d, const BoundaryMesh& mesh);

}  // namespace hexband
