#include "pseudocurve/congruence.hpp"

#include <algorithm>
#include <cmath>

namespace pseudocurve {

namespace {
constexpr int kDefaultLevel = 4;  // 2562 sample vertices

std::vector<Vec3> default_samples() {
  return Icosphere::level(kDefaultLevel).vertices;
}
}  // namespace

ComplexStructureJ ComplexStructureJ::standard() {
  Mat4 j = Mat4::Zero();
  j(1, 0) = 1.0;
  j(0, 1) = -1.0;
  j(3, 2) = 1.0;
  j(2, 3) = -1.0;
  return ComplexStructureJ(j);
}

bool ComplexStructureJ::valid(double tol) const {
  return (j * j + Mat4::Identity()).norm() < tol;
}

LineCongruence LineCongruence::constant_map(const Vec3& center) {
  LineCongruence x;
  x.kind_ = Kind::Constant;
  x.center_ = center.normalized();
  x.psi_ = [c = x.center_](const Vec3&) { return c; };
  x.samples_ = default_samples();
  return x;
}

LineCongruence LineCongruence::from_function(std::function<Vec3(const Vec3&)> psi,
                                             std::string name) {
  LineCongruence x;
  x.kind_ = Kind::Builtin;
  x.name_ = std::move(name);
  x.psi_ = std::move(psi);
  x.samples_ = default_samples();
  return x;
}

LineCongruence LineCongruence::from_grid(int level, std::vector<Vec3> values) {
  const Icosphere& sph = Icosphere::level(level);
  if (values.size() != sph.vertices.size())
    throw DomainError("from_grid: value count does not match the vertex count");
  LineCongruence x;
  x.kind_ = Kind::Grid;
  x.grid_level_ = level;
  x.grid_values_ = std::move(values);
  x.samples_ = sph.vertices;
  return x;
}

namespace {

// Containing face of y and its planar barycentric coordinates.
int containing_face(const Icosphere& sph, const Vec3& y, Vec3& bary) {
  int best = -1;
  double best_min = -1e9;
  for (size_t f = 0; f < sph.faces.size(); ++f) {
    const auto& tri = sph.faces[f];
    Eigen::Matrix3d M;
    M.col(0) = sph.vertices[tri[0]];
    M.col(1) = sph.vertices[tri[1]];
    M.col(2) = sph.vertices[tri[2]];
    const Vec3 mu = M.partialPivLu().solve(y);
    const double mn = mu.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      best = static_cast<int>(f);
      bary = mu;
    }
    if (mn >= -1e-12) return static_cast<int>(f);
  }
  return best;
}

Mat2 facet_jacobian(const Icosphere& sph, const std::vector<Vec3>& values,
                    int face) {
  const auto& tri = sph.faces[face];
  const Vec3 yc = (sph.vertices[tri[0]] + sph.vertices[tri[1]] +
                   sph.vertices[tri[2]])
                      .normalized();
  const Vec3 xc = (values[tri[0]] + values[tri[1]] + values[tri[2]]).normalized();
  Vec3 t1, t2, s1, s2;
  tangent_frame(yc, t1, t2);
  tangent_frame(xc, s1, s2);
  Eigen::Matrix<double, 2, 3> U, W;
  for (int k = 0; k < 3; ++k) {
    const Vec3 dy = sph.vertices[tri[k]] - yc;
    const Vec3 dx = values[tri[k]] - xc;
    U.col(k) = Eigen::Vector2d(t1.dot(dy), t2.dot(dy));
    W.col(k) = Eigen::Vector2d(s1.dot(dx), s2.dot(dx));
  }
  return W * U.transpose() * (U * U.transpose()).inverse();
}

}  // namespace

Vec3 LineCongruence::psi(const Vec3& y) const {
  if (kind_ == Kind::Grid) {
    const Icosphere& sph = Icosphere::level(grid_level_);
    Vec3 bary;
    const int f = containing_face(sph, y, bary);
    const auto& tri = sph.faces[f];
    Vec3 v = bary[0] * grid_values_[tri[0]] + bary[1] * grid_values_[tri[1]] +
             bary[2] * grid_values_[tri[2]];
    return v.normalized();
  }
  return psi_(y);
}

Mat2 LineCongruence::jacobian(const Vec3& y) const {
  if (kind_ == Kind::Grid) {
    const Icosphere& sph = Icosphere::level(grid_level_);
    Vec3 bary;
    const int f = containing_face(sph, y, bary);
    return facet_jacobian(sph, grid_values_, f);
  }
  const double h = derivative_step;
  Vec3 t1, t2, s1, s2;
  tangent_frame(y, t1, t2);
  const Vec3 x0 = psi(y);
  tangent_frame(x0, s1, s2);
  Mat2 J;
  const Vec3 dirs[2] = {t1, t2};
  // Dividing the chord by 2 sin(h) instead of 2h removes the leading metric
  // distortion, so isometries measure exactly norm one.
  const double scale = 2.0 * std::sin(h);
  for (int k = 0; k < 2; ++k) {
    const Vec3 xp = psi(sphere_exp(y, h * dirs[k]));
    const Vec3 xm = psi(sphere_exp(y, -h * dirs[k]));
    const Vec3 d = (xp - xm) / scale;
    J(0, k) = s1.dot(d);
    J(1, k) = s2.dot(d);
  }
  return J;
}

double LineCongruence::contraction_factor(const Vec3& y) const {
  return jacobian(y).jacobiSvd().singularValues()(0);
}

PluckerPoint LineCongruence::plane_at(const Vec3& y) const {
  return PluckerPoint(psi(y), y);
}

EllipticityReport is_elliptic(const LineCongruence& x, double tol) {
  const auto& pts = x.samples();
  std::vector<double> factors(pts.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(pts.size()); ++i)
    factors[i] = x.contraction_factor(pts[i]);
  double worst = 0.0;
  for (double f : factors) worst = std::max(worst, f);
  EllipticityReport rep;
  rep.margin = 1.0 - worst;
  rep.elliptic = rep.margin > tol;
  return rep;
}

Vec4 OsculatingStructure::apply_on_plane(const Vec4& v) const {
  const Eigen::Vector2d c = plane_basis.transpose() * v;
  return plane_basis * (jP * c);
}

Mat4 OsculatingStructure::assemble() const {
  Mat4 F;
  F.col(0) = plane_basis.col(0);
  F.col(1) = plane_basis.col(1);
  F.col(2) = complement_basis.col(0);
  F.col(3) = complement_basis.col(1);
  Mat4 blk = Mat4::Zero();
  blk.block<2, 2>(0, 0) = jP;
  blk.block<2, 2>(2, 2) = jQ;
  return F * blk * F.transpose();
}

namespace {

// Graph matrix of a nearby plane over the splitting F = (e1 e2 | n1 n2).
Mat2 graph_matrix(const Mat4& Ft, const TwoPlane& plane) {
  Eigen::Matrix<double, 4, 2> C;
  C.col(0) = Ft * plane.u;
  C.col(1) = Ft * plane.v;
  const Mat2 top = C.topRows<2>();
  const Mat2 bottom = C.bottomRows<2>();
  return bottom * top.inverse();
}

}  // namespace

OsculatingStructure osculating_structure(const LineCongruence& x, const Vec3& y,
                                         double step) {
  OsculatingStructure os;
  os.plane = x.plane_at(y);
  const TwoPlane P = plane_of_plucker(os.plane);
  Vec4 e1, e2, n1, n2;
  orthonormal_basis(P, e1, e2);
  orthonormal_complement(e1, e2, n1, n2);
  os.plane_basis.col(0) = e1;
  os.plane_basis.col(1) = e2;
  os.complement_basis.col(0) = n1;
  os.complement_basis.col(1) = n2;

  Mat4 F;
  F.col(0) = e1;
  F.col(1) = e2;
  F.col(2) = n1;
  F.col(3) = n2;
  const Mat4 Ft = F.transpose();

  Vec3 t1, t2;
  tangent_frame(y, t1, t2);
  const Vec3 dirs[2] = {t1, t2};
  Mat2 M[2];
  for (int k = 0; k < 2; ++k) {
    const Vec3 yp = sphere_exp(y, step * dirs[k]);
    const Vec3 ym = sphere_exp(y, -step * dirs[k]);
    const Mat2 mp = graph_matrix(Ft, plane_of_plucker(x.plane_at(yp)));
    const Mat2 mm = graph_matrix(Ft, plane_of_plucker(x.plane_at(ym)));
    M[k] = -(mp - mm) / (2.0 * step);
  }

  const double g11 = bilinear_form(M[0], M[0]);
  const double g12 = bilinear_form(M[0], M[1]);
  const double g22 = bilinear_form(M[1], M[1]);
  if (g11 <= 0.0 || g11 * g22 - g12 * g12 <= 0.0)
    throw NotEllipticError(
        "osculating_structure: tangent plane is not positive definite");

  Mat2 A = M[0] / std::sqrt(quad_form(M[0]));
  Mat2 Bt = M[1] - 0.5 * bilinear_form(M[1], A) * A;
  const double qb = quad_form(Bt);
  if (qb <= 0.0)
    throw NotEllipticError("osculating_structure: degenerate tangent plane");
  Mat2 B = Bt / std::sqrt(qb);

  os.A = A;
  os.B = B;
  os.jP = A.inverse() * B;
  os.jQ = B * A.inverse();
  return os;
}

LineCongruence riemann_sphere(const ComplexStructureJ& j) {
  if (!j.valid())
    throw NotAComplexStructureError("riemann_sphere: j*j != -1");
  const Mat4 J = j.j;

  // Matrix of the induced involution on 2-vectors in the coefficient basis.
  Eigen::Matrix<double, 6, 6> L;
  const int pairs[6][2] = {{0, 1}, {2, 3}, {2, 0}, {1, 3}, {1, 2}, {0, 3}};
  for (int col = 0; col < 6; ++col) {
    const Vec6 img =
        wedge_coefficients(J.col(pairs[col][0]), J.col(pairs[col][1]));
    L.col(col) = img;
  }

  // Fixed subspace of the involution (4-dimensional).
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(
      L - Eigen::Matrix<double, 6, 6>::Identity(), Eigen::ComputeFullV);
  // The involution fixes a 4-dimensional space, so L - I has rank exactly 2.
  if (svd.singularValues()(1) < 1e-8 || svd.singularValues()(2) > 1e-6)
    throw NotAComplexStructureError(
        "riemann_sphere: fixed 2-vector space is not 4-dimensional");
  Eigen::Matrix<double, 6, 4> W = svd.matrixV().rightCols<4>();

  // Split maps: coefficients -> (X, Y) parts.
  Eigen::Matrix<double, 3, 6> SX = Eigen::Matrix<double, 3, 6>::Zero();
  Eigen::Matrix<double, 3, 6> SY = Eigen::Matrix<double, 3, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    SX(k, 2 * k) = 0.5;
    SX(k, 2 * k + 1) = 0.5;
    SY(k, 2 * k) = 0.5;
    SY(k, 2 * k + 1) = -0.5;
  }
  const Eigen::Matrix<double, 3, 4> MY = SY * W;
  const Eigen::Matrix<double, 3, 4> MX = SX * W;
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> ysvd(
      MY, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (ysvd.singularValues()(2) < 1e-10)
    throw NotGraphError(
        "riemann_sphere: sphere of complex lines is not a graph over S2-");
  const Eigen::Vector4d kernel = ysvd.matrixV().col(3);

  auto psi = [MY, MX, kernel, ysvd, J](const Vec3& y) -> Vec3 {
    const Eigen::Vector4d c0 = ysvd.solve(y);
    const Vec3 X0 = MX * c0;
    const Vec3 Xk = MX * kernel;
    const double a = Xk.squaredNorm();
    const double b = 2.0 * X0.dot(Xk);
    const double c = X0.squaredNorm() - 1.0;
    const double disc = b * b - 4.0 * a * c;
    if (a < 1e-14 || disc < 0.0)
      throw NotGraphError("riemann_sphere: no unit solution over this point");
    const double sq = std::sqrt(disc);
    for (double t : {(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)}) {
      const Vec3 X = X0 + t * Xk;
      const TwoPlane plane = plane_of_plucker(PluckerPoint(X, y));
      const Vec6 gamma = wedge_coefficients(plane.u, J * plane.u);
      if (gamma.dot(coefficients_of_split(X, y)) > 0.0) return X;
    }
    throw NotGraphError("riemann_sphere: orientation selection failed");
  };

  LineCongruence x = LineCongruence::from_function(psi, "riemann");
  x.set_riemann_j(J);
  return x;
}

PlaneThroughVector plane_through_vector(const LineCongruence& x, const Vec4& v) {
  if (v.norm() < 1e-14)
    throw DomainError("plane_through_vector: zero vector");
  if (!x.full_domain())
    throw DomainError("plane_through_vector: congruence is not defined on all of S2-");
  const Vec4 vn = v.normalized();

  auto F = [&](const Vec3& y) -> Vec4 {
    const PluckerPoint p = x.plane_at(y);
    const Mat4 W = antisymmetric_matrix(coefficients_of_split(p.X, p.Y));
    return wedge3(vn, W);
  };

  // Coarse scan for starting points.
  const auto& pts = x.samples();
  std::vector<std::pair<double, int>> score(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    score[i] = {F(pts[i]).norm(), static_cast<int>(i)};
  std::sort(score.begin(), score.end());

  double best_res = 1e300;
  Vec3 best_y = pts[score[0].second];
  const int starts = std::min<int>(3, static_cast<int>(score.size()));
  for (int s = 0; s < starts; ++s) {
    Vec3 y = pts[score[s].second];
    for (int it = 0; it < 60; ++it) {
      const Vec4 r = F(y);
      if (r.norm() < best_res) {
        best_res = r.norm();
        best_y = y;
      }
      if (r.norm() < 1e-12) break;
      Vec3 t1, t2;
      tangent_frame(y, t1, t2);
      const double h = 1e-6;
      Eigen::Matrix<double, 4, 2> Jf;
      Jf.col(0) = (F(sphere_exp(y, h * t1)) - F(sphere_exp(y, -h * t1))) / (2 * h);
      Jf.col(1) = (F(sphere_exp(y, h * t2)) - F(sphere_exp(y, -h * t2))) / (2 * h);
      const Eigen::Vector2d step =
          Jf.colPivHouseholderQr().solve(-r);
      Eigen::Vector2d capped = step;
      if (capped.norm() > 0.3) capped *= 0.3 / capped.norm();
      y = sphere_exp(y, capped[0] * t1 + capped[1] * t2);
    }
    if (best_res < 1e-10) break;
  }
  if (best_res > 1e-8)
    throw NoConvergenceError("plane_through_vector: root finder stalled",
                             best_res);

  PlaneThroughVector out;
  out.y = best_y;
  out.plane = x.plane_at(best_y);
  out.residual = best_res;
  const OsculatingStructure os = osculating_structure(x, best_y);
  // Project out the (numerically tiny) normal component before applying.
  const Eigen::Vector2d c = os.plane_basis.transpose() * v;
  out.jv = os.plane_basis * (os.jP * c);
  return out;
}

RealPointLoop real_points_curve(const LineCongruence& x, const TwoPlane& r,
                                const TracingOptions& opt) {
  const PluckerPoint rp = plucker_of_plane(r);
  const Vec3 X0 = rp.X, Y0 = rp.Y;
  if (x.psi(Y0).dot(X0) > 1.0 - 1e-8 || x.psi(-Y0).dot(X0) < -1.0 + 1e-8)
    throw NotTotallyRealError("real_points_curve: plane lies on the congruence");

  auto F = [&](const Vec3& y) { return Y0.dot(y) - X0.dot(x.psi(y)); };
  auto gradF = [&](const Vec3& y) -> Vec3 {
    Vec3 t1, t2;
    tangent_frame(y, t1, t2);
    const double h = 1e-6;
    const double g1 = (F(sphere_exp(y, h * t1)) - F(sphere_exp(y, -h * t1))) / (2 * h);
    const double g2 = (F(sphere_exp(y, h * t2)) - F(sphere_exp(y, -h * t2))) / (2 * h);
    return g1 * t1 + g2 * t2;
  };
  auto correct = [&](Vec3 y) -> std::optional<Vec3> {
    for (int it = 0; it < 40; ++it) {
      const double f = F(y);
      if (std::abs(f) < opt.corrector_tol) return y;
      const Vec3 g = gradF(y);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-18) return std::nullopt;
      y = sphere_exp(y, (-f / g2) * g);
    }
    return std::nullopt;
  };

  // Starting point: best sample then correct.
  const auto& pts = x.samples();
  Vec3 start = pts[0];
  double best = 1e300;
  for (const auto& p : pts) {
    const double f = std::abs(F(p));
    if (f < best) {
      best = f;
      start = p;
    }
  }
  auto corrected = correct(start);
  if (!corrected)
    throw TracingFailureError("real_points_curve: no starting point found");
  start = *corrected;

  RealPointLoop loop;
  loop.samples.push_back(start);
  Vec3 y = start;
  Vec3 heading = Vec3::Zero();
  for (int step = 0; step < opt.max_steps; ++step) {
    const Vec3 g = gradF(y);
    Vec3 d = y.cross(g);
    if (d.norm() < 1e-14)
      throw TracingFailureError("real_points_curve: vanishing tangent");
    d.normalize();
    if (step > 0 && d.dot(heading) < 0.0) d = -d;
    heading = d;
    auto next = correct(sphere_exp(y, opt.step * d));
    if (!next)
      throw TracingFailureError("real_points_curve: corrector diverged");
    y = *next;
    loop.samples.push_back(y);
    if (step > 10 && sphere_log(start, y).norm() < 0.5 * opt.step) {
      loop.closed = true;
      break;
    }
  }
  if (!loop.closed)
    throw TracingFailureError("real_points_curve: did not close within max steps");
  return loop;
}

TamingForm taming_form(const LineCongruence& x) {
  const auto rep = is_elliptic(x);
  if (!rep.elliptic)
    throw NotEllipticError("taming_form: congruence is not elliptic");
  const auto& pts = x.samples();
  std::vector<Vec3> images(pts.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(pts.size()); ++i)
    images[i] = x.psi(pts[i]);

  Vec3 mean = Vec3::Zero();
  for (const auto& im : images) mean += im;
  if (mean.norm() < 1e-9)
    throw MeanDegenerateError("taming_form: spherical mean is degenerate");
  Vec3 omega = mean.normalized();

  auto min_dot = [&](const Vec3& w, int* arg) {
    double mn = 1e300;
    for (size_t i = 0; i < images.size(); ++i) {
      const double d = w.dot(images[i]);
      if (d < mn) {
        mn = d;
        if (arg) *arg = static_cast<int>(i);
      }
    }
    return mn;
  };
  // The mean already works for every elliptic congruence we generate; the
  // perceptron loop is a fallback for images hugging the hemisphere boundary.
  int worst = 0;
  double mn = min_dot(omega, &worst);
  for (int it = 0; it < 200 && mn <= 0.0; ++it) {
    omega = (omega + 0.2 * images[worst]).normalized();
    mn = min_dot(omega, &worst);
  }

  TamingForm tf;
  tf.omega = omega;
  tf.min_value = mn;
  tf.coefficients << omega[0], omega[0], omega[1], omega[1], omega[2], omega[2];
  return tf;
}

bool is_tamed(const LineCongruence& x, const Vec6& omega) {
  for (const auto& y : x.samples())
    if (form_value_on_plane(omega, x.plane_at(y)) <= 0.0) return false;
  return true;
}

LineCongruence deform(const LineCongruence& x, double t) {
  const TamingForm tf = taming_form(x);  // checks ellipticity
  if (t <= 0.0) return x;
  const Vec3 omega = tf.omega;
  const double factor = 1.0 - t;
  auto base = [x](const Vec3& y) { return x.psi(y); };
  auto psi = [base, omega, factor](const Vec3& y) {
    return sphere_exp(omega, factor * sphere_log(omega, base(y)));
  };
  LineCongruence out = LineCongruence::from_function(psi, "deformed");
  out.set_samples(x.samples());
  return out;
}

}  // namespace pseudocurve
