#include "pseudocurve/grassmann.hpp"

#include <cmath>

namespace pseudocurve {

Vec6 wedge_coefficients(const Vec4& u, const Vec4& v) {
  auto g = [&](int i, int j) { return u[i] * v[j] - u[j] * v[i]; };
  Vec6 c;
  c[0] = g(0, 1);   // e12
  c[1] = g(2, 3);   // e34
  c[2] = g(2, 0);   // e31
  c[3] = g(1, 3);   // e24
  c[4] = g(1, 2);   // e23
  c[5] = g(0, 3);   // e14
  return c;
}

Vec6 coefficients_of_split(const Vec3& X, const Vec3& Y) {
  Vec6 c;
  c[0] = X[0] + Y[0];
  c[1] = X[0] - Y[0];
  c[2] = X[1] + Y[1];
  c[3] = X[1] - Y[1];
  c[4] = X[2] + Y[2];
  c[5] = X[2] - Y[2];
  return c;
}

double wedge_square(const Vec6& c) {
  return 2.0 * (c[0] * c[1] + c[2] * c[3] + c[4] * c[5]);
}

Mat4 antisymmetric_matrix(const Vec6& c) {
  Mat4 W = Mat4::Zero();
  W(0, 1) = c[0];
  W(2, 3) = c[1];
  W(0, 2) = -c[2];  // coefficient of e31
  W(1, 3) = c[3];
  W(1, 2) = c[4];
  W(0, 3) = c[5];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) W(i, j) = -W(j, i);
  return W;
}

Vec4 wedge3(const Vec4& v, const Mat4& W) {
  auto comp = [&](int i, int j, int k) {
    return v[i] * W(j, k) - v[j] * W(i, k) + v[k] * W(i, j);
  };
  return Vec4(comp(0, 1, 2), comp(0, 1, 3), comp(0, 2, 3), comp(1, 2, 3));
}

PluckerPoint plucker_of_plane(const TwoPlane& plane) {
  const Vec6 c = wedge_coefficients(plane.u, plane.v);
  if (c.norm() < 1e-12)
    throw DegenerateBasisError("plucker_of_plane: basis wedge is numerically zero");
  Vec3 X(0.5 * (c[0] + c[1]), 0.5 * (c[2] + c[3]), 0.5 * (c[4] + c[5]));
  Vec3 Y(0.5 * (c[0] - c[1]), 0.5 * (c[2] - c[3]), 0.5 * (c[4] - c[5]));
  const double nx = X.norm(), ny = Y.norm();
  if (nx < 1e-14 || ny < 1e-14)
    throw DegenerateBasisError("plucker_of_plane: degenerate split");
  return PluckerPoint(X / nx, Y / ny);
}

TwoPlane plane_of_plucker(const PluckerPoint& point) {
  const double nx = point.X.norm(), ny = point.Y.norm();
  if (std::abs(nx - 1.0) > 1e-9 || std::abs(ny - 1.0) > 1e-9)
    throw NotOnQuadricError("plane_of_plucker: |X| and |Y| must both be 1");
  const Mat4 W = antisymmetric_matrix(coefficients_of_split(point.X, point.Y));
  // The plane is the kernel of v -> v ^ W. Assemble that linear map and take
  // the two smallest singular directions.
  Mat4 A;
  for (int col = 0; col < 4; ++col) {
    Vec4 e = Vec4::Zero();
    e[col] = 1.0;
    A.col(col) = wedge3(e, W);
  }
  Eigen::JacobiSVD<Mat4> svd(A, Eigen::ComputeFullV);
  Vec4 u = svd.matrixV().col(2);
  Vec4 v = svd.matrixV().col(3);
  TwoPlane plane(u, v);
  const PluckerPoint back = plucker_of_plane(plane);
  if (back.X.dot(point.X) < 0.0) std::swap(plane.u, plane.v);
  return plane;
}

double quad_form(const Mat2& m) { return m.determinant(); }

double bilinear_form(const Mat2& a, const Mat2& b) {
  return a(0, 0) * b(1, 1) + b(0, 0) * a(1, 1) - a(0, 1) * b(1, 0) -
         b(0, 1) * a(1, 0);
}

Incidence incidence(const PluckerPoint& p0, const PluckerPoint& p1,
                    double tol) {
  const double dx = p0.X.dot(p1.X);
  const double dy = p0.Y.dot(p1.Y);
  if ((std::abs(dx - 1.0) < tol && std::abs(dy - 1.0) < tol) ||
      (std::abs(dx + 1.0) < tol && std::abs(dy + 1.0) < tol))
    return Incidence::SamePlane;
  if (std::abs(dx - dy) < tol) return Incidence::MeetInLine;
  return Incidence::Transverse;
}

void orthonormal_basis(const TwoPlane& p, Vec4& e1, Vec4& e2) {
  e1 = p.u.normalized();
  e2 = (p.v - p.v.dot(e1) * e1);
  const double n = e2.norm();
  if (n < 1e-12)
    throw DegenerateBasisError("orthonormal_basis: dependent basis vectors");
  e2 /= n;
}

void orthonormal_complement(const Vec4& e1, const Vec4& e2, Vec4& n1,
                            Vec4& n2) {
  // Complete (e1, e2) to an orthonormal frame by Gram-Schmidt on the least
  // aligned coordinate axes, then fix overall orientation.
  Eigen::Matrix<double, 4, 2> B;
  B.col(0) = e1;
  B.col(1) = e2;
  int taken = 0;
  Vec4 cand[2];
  for (int axis = 0; axis < 4 && taken < 2; ++axis) {
    Vec4 e = Vec4::Zero();
    e[axis] = 1.0;
    Vec4 r = e - e1.dot(e) * e1 - e2.dot(e) * e2;
    for (int k = 0; k < taken; ++k) r -= cand[k].dot(r) * cand[k];
    if (r.norm() > 0.3) cand[taken++] = r.normalized();
  }
  if (taken < 2) {
    // Extremely skewed frame; fall back to a dense completion.
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(B, Eigen::ComputeFullU);
    cand[0] = svd.matrixU().col(2);
    cand[1] = svd.matrixU().col(3);
  }
  n1 = cand[0];
  n2 = cand[1];
  Mat4 F;
  F.col(0) = e1;
  F.col(1) = e2;
  F.col(2) = n1;
  F.col(3) = n2;
  if (F.determinant() < 0.0) n2 = -n2;
}

double subspace_distance(const TwoPlane& a, const TwoPlane& b) {
  Vec4 a1, a2, b1, b2;
  orthonormal_basis(a, a1, a2);
  orthonormal_basis(b, b1, b2);
  Eigen::Matrix<double, 4, 2> A, B;
  A.col(0) = a1;
  A.col(1) = a2;
  B.col(0) = b1;
  B.col(1) = b2;
  // Residual of projecting A onto span(B); its largest singular value is the
  // sine of the largest principal angle.
  Eigen::Matrix<double, 4, 2> R = A - B * (B.transpose() * A);
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(R);
  return svd.singularValues()(0);
}

bool planes_equal(const TwoPlane& a, const TwoPlane& b, double tol) {
  if (subspace_distance(a, b) >= tol) return false;
  const PluckerPoint pa = plucker_of_plane(a);
  const PluckerPoint pb = plucker_of_plane(b);
  return pa.X.dot(pb.X) > 0.0;
}

double form_value_on_plane(const Vec6& form, const PluckerPoint& p) {
  const Vec3 A(0.5 * (form[0] + form[1]), 0.5 * (form[2] + form[3]),
               0.5 * (form[4] + form[5]));
  const Vec3 B(0.5 * (form[0] - form[1]), 0.5 * (form[2] - form[3]),
               0.5 * (form[4] - form[5]));
  return A.dot(p.X) + B.dot(p.Y);
}

}  // namespace pseudocurve
