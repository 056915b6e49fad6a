#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pseudocurve/grassmann.hpp"
#include "pseudocurve/icosphere.hpp"

namespace pseudocurve {

// A linear complex structure on R^4.
struct ComplexStructureJ {
  Mat4 j = Mat4::Zero();

  explicit ComplexStructureJ(const Mat4& m) : j(m) {}
  static ComplexStructureJ standard();
  bool valid(double tol = 1e-10) const;
};

// A surface of oriented 2-planes in graph form: a map psi from the
// anti-self-dual sphere S2- to the self-dual sphere S2+, with derivative
// access. Immutable after construction.
class LineCongruence {
 public:
  enum class Kind { Constant, Builtin, Grid };

  static LineCongruence constant_map(const Vec3& center);
  static LineCongruence from_function(std::function<Vec3(const Vec3&)> psi,
                                      std::string name = "");
  // Geodesic-interpolated values on the vertices of Icosphere::level(level).
  static LineCongruence from_grid(int level, std::vector<Vec3> values);

  Vec3 psi(const Vec3& y) const;

  // Derivative in orthonormal tangent frames, rows indexed by the image
  // frame at psi(y) and columns by the frame at y. Central differences with
  // geodesic step `derivative_step` unless the representation carries its
  // own derivative (grid facets).
  Mat2 jacobian(const Vec3& y) const;
  double contraction_factor(const Vec3& y) const;  // operator norm of jacobian

  // The plane of the congruence over y, as a Klein point and as a plane.
  PluckerPoint plane_at(const Vec3& y) const;

  const std::vector<Vec3>& samples() const { return samples_; }
  void set_samples(std::vector<Vec3> s) { samples_ = std::move(s); }
  bool full_domain() const { return full_domain_; }
  void set_full_domain(bool b) { full_domain_ = b; }
  bool graph_defect() const { return graph_defect_; }
  void set_graph_defect(bool b) { graph_defect_ = b; }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Vec3& center() const { return center_; }
  int grid_level() const { return grid_level_; }
  const std::vector<Vec3>& grid_values() const { return grid_values_; }
  const std::optional<Mat4>& riemann_j() const { return riemann_j_; }
  void set_riemann_j(const Mat4& m) { riemann_j_ = m; }

  double derivative_step = 1e-4;

 private:
  LineCongruence() = default;

  Kind kind_ = Kind::Builtin;
  std::string name_;
  Vec3 center_ = Vec3::UnitX();
  std::function<Vec3(const Vec3&)> psi_;
  int grid_level_ = 0;
  std::vector<Vec3> grid_values_;
  std::optional<Mat4> riemann_j_;
  std::vector<Vec3> samples_;
  bool full_domain_ = true;
  bool graph_defect_ = false;
};

struct EllipticityReport {
  bool elliptic = false;
  double margin = 0.0;  // 1 - max contraction factor over the samples
};

// Gluck-Warner test: strict contraction of psi at every sample point.
EllipticityReport is_elliptic(const LineCongruence& x, double tol = 1e-9);

// The complex structure osculating the congruence at the plane over y,
// restricted to the plane (jP, in the columns of plane_basis) and to its
// quotient (jQ, in the columns of complement_basis).
struct OsculatingStructure {
  Mat2 jP = Mat2::Zero();
  Mat2 jQ = Mat2::Zero();
  Eigen::Matrix<double, 4, 2> plane_basis;
  Eigen::Matrix<double, 4, 2> complement_basis;
  PluckerPoint plane;
  Mat2 A = Mat2::Zero();  // det-orthonormal oriented basis of the tangent
  Mat2 B = Mat2::Zero();

  // Ambient action of the osculating structure on a vector of the plane.
  Vec4 apply_on_plane(const Vec4& v) const;
  // Block extension of (jP, jQ) through the stored splitting.
  Mat4 assemble() const;
};

OsculatingStructure osculating_structure(const LineCongruence& x,
                                         const Vec3& y, double step = 1e-4);

// The Riemann sphere of complex lines of j, fitted as a graph over S2-.
LineCongruence riemann_sphere(const ComplexStructureJ& j);

struct PlaneThroughVector {
  PluckerPoint plane;
  Vec3 y = Vec3::Zero();
  Vec4 jv = Vec4::Zero();
  double residual = 0.0;
};

// The unique plane of a compact elliptic congruence containing v, and the
// osculating structure applied to v.
PlaneThroughVector plane_through_vector(const LineCongruence& x, const Vec4& v);

struct RealPointLoop {
  std::vector<Vec3> samples;  // points of S2- tracing the solution set
  bool closed = false;
};

struct TracingOptions {
  double step = 0.01;            // arc length on S2-
  double corrector_tol = 1e-10;
  int max_steps = 4000;
};

// Traces the closed curve of congruence planes meeting the totally real
// plane r in a line.
RealPointLoop real_points_curve(const LineCongruence& x, const TwoPlane& r,
                                const TracingOptions& opt = {});

struct TamingForm {
  Vec3 omega = Vec3::Zero();    // point of S2+
  Vec6 coefficients = Vec6::Zero();
  double min_value = 0.0;       // min over samples of omega . psi(y)
};

// Normalized spherical mean of the image, with the induced self-dual form.
TamingForm taming_form(const LineCongruence& x);

// True when the form is positive on every sampled plane of the congruence.
bool is_tamed(const LineCongruence& x, const Vec6& omega);

// Geodesic contraction of psi toward the taming center by factor (1 - t).
LineCongruence deform(const LineCongruence& x, double t);

}  // namespace pseudocurve
