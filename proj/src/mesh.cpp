#include "hexband/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace hexband {

BoundaryMesh discretize(const InclusionLayout& layout, int nodes_per_circle) {
  if (nodes_per_circle < 8 || nodes_per_circle % 2 != 0)
    throw std::invalid_argument("discretize: node count must be even and >= 8");

  BoundaryMesh mesh;
  mesh.layout = layout;
  mesh.nodes_per_circle = nodes_per_circle;
  const double r = layout.radius;
  const double w = 2.0 * kPi * r / nodes_per_circle;

  mesh.angles.resize(nodes_per_circle);
  for (int k = 0; k < nodes_per_circle; ++k)
    mesh.angles[k] = 2.0 * kPi * k / nodes_per_circle;

  mesh.points.reserve(layout.count() * nodes_per_circle);
  mesh.normals.reserve(layout.count() * nodes_per_circle);
  mesh.weights.assign(layout.count() * nodes_per_circle, w);
  for (const Vec2& c : layout.centers) {
    for (int k = 0; k < nodes_per_circle; ++k) {
      const Vec2 dir(std::cos(mesh.angles[k]), std::sin(mesh.angles[k]));
      mesh.points.push_back(c + r * dir);
      mesh.normals.push_back(dir);
    }
  }
  return mesh;
}

Complex integrate(const Density& d, const BoundaryMesh& mesh,
                  const std::vector<int>& circles) {
  if (d.size() != mesh.total_nodes())
    throw std::invalid_argument("integrate: density size does not match mesh");
  Complex acc(0.0);
  if (circles.empty()) {
    for (int i = 0; i < mesh.total_nodes(); ++i) acc += mesh.weights[i] * d[i];
    return acc;
  }
  for (int c : circles) {
    if (c < 0 || c >= mesh.circle_count())
      throw std::out_of_range("integrate: circle index out of range");
    for (int k = 0; k < mesh.nodes_per_circle; ++k) {
      const int i = mesh.node_index(c, k);
      acc += mesh.weights[i] * d[i];
    }
  }
  return acc;
}

Density indicator(int circle, const BoundaryMesh& mesh) {
  if (circle < 0 || circle >= mesh.circle_count())
    throw std::out_of_range("indicator: circle index out of range");
  Density d = Density::Zero(mesh.total_nodes());
  for (int k = 0; k < mesh.nodes_per_circle; ++k)
    d[mesh.node_index(circle, k)] = 1.0;
  return d;
}

Density project_mean_zero(const Density& d, const BoundaryMesh& mesh) {
  double total = 0.0;
  for (double w : mesh.weights) total += w;
  const Complex mean = integrate(d, mesh) / total;
  return d.array() - mean;
}

}  // namespace hexband
