#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace pseudocurve {

// Subdivided icosahedron projected to the unit sphere. Level L has
// 10 * 4^L + 2 vertices. Vertex order is deterministic for a given level.
struct Icosphere {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  // Barycentric dual area per vertex (one third of incident spherical
  // triangle areas); sums to 4 pi.
  std::vector<double> weights;

  static const Icosphere& level(int L);
};

// Orthonormal tangent frame (t1, t2) at a point of the unit sphere with
// t1 x t2 = y (outward orientation).
void tangent_frame(const Eigen::Vector3d& y, Eigen::Vector3d& t1,
                   Eigen::Vector3d& t2);

// Geodesic exponential on the unit sphere.
Eigen::Vector3d sphere_exp(const Eigen::Vector3d& y, const Eigen::Vector3d& v);

// Inverse of sphere_exp; requires x != -y.
Eigen::Vector3d sphere_log(const Eigen::Vector3d& y, const Eigen::Vector3d& x);

}  // namespace pseudocurve
