#include "pseudocurve/icosphere.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace pseudocurve {

namespace {

using Eigen::Vector3d;

Icosphere build_base() {
  Icosphere s;
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double nrm = std::sqrt(1.0 + phi * phi);
  const double a = 1.0 / nrm, b = phi / nrm;
  s.vertices = {
      {-a, b, 0},  {a, b, 0},  {-a, -b, 0}, {a, -b, 0}, {0, -a, b}, {0, a, b},
      {0, -a, -b}, {0, a, -b}, {b, 0, -a},  {b, 0, a},  {-b, 0, -a}, {-b, 0, a},
  };
  s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return s;
}

Icosphere subdivide(const Icosphere& in) {
  Icosphere out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int i, int j) {
    auto key = std::minmax(i, j);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vector3d m = (out.vertices[i] + out.vertices[j]).normalized();
    out.vertices.push_back(m);
    int idx = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
    out.faces.push_back({f[0], a, c});
    out.faces.push_back({f[1], b, a});
    out.faces.push_back({f[2], c, b});
    out.faces.push_back({a, b, c});
  }
  return out;
}

double spherical_triangle_area(const Vector3d& A, const Vector3d& B,
                               const Vector3d& C) {
  // L'Huilier via the vector formula: tan(E/2) = |A.(BxC)| / (1 + A.B + B.C + C.A)
  const double num = std::abs(A.dot(B.cross(C)));
  const double den = 1.0 + A.dot(B) + B.dot(C) + C.dot(A);
  return 2.0 * std::atan2(num, den);
}

void fill_weights(Icosphere& s) {
  s.weights.assign(s.vertices.size(), 0.0);
  for (const auto& f : s.faces) {
    const double area = spherical_triangle_area(s.vertices[f[0]],
                                                s.vertices[f[1]],
                                                s.vertices[f[2]]);
    for (int k = 0; k < 3; ++k) s.weights[f[k]] += area / 3.0;
  }
}

}  // namespace

const Icosphere& Icosphere::level(int L) {
  static std::mutex mu;
  static std::map<int, Icosphere> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  Icosphere s = build_base();
  for (int k = 0; k < L; ++k) s = subdivide(s);
  fill_weights(s);
  return cache.emplace(L, std::move(s)).first->second;
}

void tangent_frame(const Vector3d& y, Vector3d& t1, Vector3d& t2) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(y[i]) < std::abs(y[k])) k = i;
  Vector3d e = Vector3d::Zero();
  e[k] = 1.0;
  t1 = (e - e.dot(y) * y).normalized();
  t2 = y.cross(t1);  // (t1, t2, y) right handed, so t1 x t2 = y
}

Vector3d sphere_exp(const Vector3d& y, const Vector3d& v) {
  const double n = v.norm();
  if (n < 1e-300) return y;
  return std::cos(n) * y + std::sin(n) * (v / n);
}

Vector3d sphere_log(const Vector3d& y, const Vector3d& x) {
  const Vector3d p = x - x.dot(y) * y;
  const double n = p.norm();
  const double ang = std::atan2(n, x.dot(y));
  if (n < 1e-300) return Vector3d::Zero();
  return ang * (p / n);
}

}  // namespace pseudocurve
