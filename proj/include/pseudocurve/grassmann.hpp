#pragma once

#include <Eigen/Dense>

#include "pseudocurve/errors.hpp"

namespace pseudocurve {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// An oriented 2-plane in R^4, encoded by an ordered basis (u, v).
// Rebasing by any 2x2 matrix of positive determinant gives an equal plane.
struct TwoPlane {
  Vec4 u = Vec4::Zero();
  Vec4 v = Vec4::Zero();

  TwoPlane() = default;
  TwoPlane(const Vec4& u_, const Vec4& v_) : u(u_), v(v_) {}
};

// A point of the product of unit spheres S2+ x S2- describing an oriented
// 2-plane through the wedge decomposition into self-dual and anti-self-dual
// parts. Normalized so |X| = |Y| = 1.
struct PluckerPoint {
  Vec3 X = Vec3::Zero();
  Vec3 Y = Vec3::Zero();

  PluckerPoint() = default;
  PluckerPoint(const Vec3& X_, const Vec3& Y_) : X(X_), Y(Y_) {}

  PluckerPoint antipode() const { return PluckerPoint(-X, -Y); }
};

enum class Incidence { Transverse, MeetInLine, SamePlane };

// Coefficient order of the six basis 2-vectors used everywhere in this
// library: e12, e34, e31, e24, e23, e14.
// A 2-vector with these coefficients (c1..c6) splits as
//   X = ((c1+c2)/2, (c3+c4)/2, (c5+c6)/2)
//   Y = ((c1-c2)/2, (c3-c4)/2, (c5-c6)/2)
// and gamma ^ gamma = 2 (c1 c2 + c3 c4 + c5 c6) e1234 = 2 (|X|^2 - |Y|^2) e1234.
Vec6 wedge_coefficients(const Vec4& u, const Vec4& v);

// Inverse of the coefficient split: the 6 coefficients of the 2-vector whose
// split parts are (X, Y) (not necessarily unit).
Vec6 coefficients_of_split(const Vec3& X, const Vec3& Y);

// e1234 coefficient of the wedge square of a 2-vector given by coefficients.
double wedge_square(const Vec6& c);

// The 2-vector as an antisymmetric 4x4 matrix W with W(i,j) = gamma_ij.
Mat4 antisymmetric_matrix(const Vec6& c);

// Components of v ^ gamma in the basis (e123, e124, e134, e234).
Vec4 wedge3(const Vec4& v, const Mat4& W);

// Klein split of the plane spanned by (u, v). Throws DegenerateBasisError
// when the wedge has norm below 1e-12.
PluckerPoint plucker_of_plane(const TwoPlane& plane);

// Reconstructs an oriented plane from a point of S2+ x S2-. The returned
// basis is orthonormal and oriented so that plucker_of_plane round-trips.
// Throws NotOnQuadricError when |X| or |Y| is off 1 by more than 1e-9.
TwoPlane plane_of_plucker(const PluckerPoint& point);

// Conformal quadratic form on tangents of the Grassmannian: det of the 2x2
// matrix representing the tangent.
double quad_form(const Mat2& m);

// The symmetric bilinear form with bilinear(a, a) = 2 quad_form(a):
// A11 B22 + B11 A22 - A12 B21 - B12 A21.
double bilinear_form(const Mat2& a, const Mat2& b);

// Classifies the mutual position of two oriented planes on the quadric.
Incidence incidence(const PluckerPoint& p0, const PluckerPoint& p1,
                    double tol = 1e-9);

// True when the two oriented planes agree: subspaces within principal-angle
// tolerance and orientations aligned.
bool planes_equal(const TwoPlane& a, const TwoPlane& b, double tol = 1e-8);

// Largest principal-angle sine between the two spans.
double subspace_distance(const TwoPlane& a, const TwoPlane& b);

// Orthonormal basis of the plane keeping its orientation.
void orthonormal_basis(const TwoPlane& p, Vec4& e1, Vec4& e2);

// Orthonormal basis (n1, n2) of the orthogonal complement, chosen so that
// (e1, e2, n1, n2) is positively oriented in R^4.
void orthonormal_complement(const Vec4& e1, const Vec4& e2, Vec4& n1, Vec4& n2);

// Value of a 2-form with the given six coefficients on an oriented plane,
// normalized against an orthonormal basis of the plane. With (A, B) the
// self-dual and anti-self-dual parts of the form this equals A.X + B.Y.
double form_value_on_plane(const Vec6& form, const PluckerPoint& p);

}  // namespace pseudocurve
