#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pseudocurve/congruence.hpp"

using namespace pseudocurve;

namespace {

std::mt19937_64 rng(77031u);

double urand(double a = -1.0, double b = 1.0) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

Vec3 random_unit3() {
  Vec3 v;
  do {
    v = Vec3(urand(), urand(), urand());
  } while (v.norm() < 0.2);
  return v.normalized();
}

Vec4 random_unit4() {
  Vec4 v;
  do {
    v = Vec4(urand(), urand(), urand(), urand());
  } while (v.norm() < 0.2);
  return v.normalized();
}

Mat4 random_glplus(double spread = 0.4) {
  for (;;) {
    Mat4 g = Mat4::Identity();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) += spread * urand();
    if (g.determinant() > 0.3) return g;
  }
}

// Smooth elliptic fixture: geodesic displacement of a constant map by a
// linear tangent field, then optional contraction toward the center.
LineCongruence perturbed_congruence(const Vec3& center, double eps,
                                    unsigned seed) {
  std::mt19937_64 local(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::Matrix3d B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B(i, j) = d(local);
  auto psi = [center, eps, B](const Vec3& y) {
    const Vec3 w = B * y;
    const Vec3 t = w - center.dot(w) * center;
    return sphere_exp(center, eps * t);
  };
  return LineCongruence::from_function(psi, "perturbed");
}

LineCongruence contract_toward(const LineCongruence& x, const Vec3& c,
                               double factor) {
  auto base = [x](const Vec3& y) { return x.psi(y); };
  auto psi = [base, c, factor](const Vec3& y) {
    return sphere_exp(c, factor * sphere_log(c, base(y)));
  };
  LineCongruence out = LineCongruence::from_function(psi, "contracted");
  out.set_samples(x.samples());
  return out;
}

Vec4 axis(int i) {
  Vec4 e = Vec4::Zero();
  e[i] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("riemann sphere of the standard structure is the constant map") {
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  for (int k = 0; k < 50; ++k) {
    const Vec3 y = random_unit3();
    CHECK((x.psi(y) - Vec3(1, 0, 0)).norm() < 1e-10);
  }
  const auto rep = is_elliptic(x);
  CHECK(rep.elliptic);
  CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("riemann sphere of minus the standard structure") {
  Mat4 mj = -ComplexStructureJ::standard().j;
  const LineCongruence x = riemann_sphere(ComplexStructureJ(mj));
  for (int k = 0; k < 20; ++k)
    CHECK((x.psi(random_unit3()) - Vec3(-1, 0, 0)).norm() < 1e-10);
}

TEST_CASE("riemann sphere rejects non-structures") {
  Mat4 m = Mat4::Identity();
  CHECK_THROWS_AS(riemann_sphere(ComplexStructureJ(m)),
                  NotAComplexStructureError);
}

TEST_CASE("conjugated riemann spheres contain exactly the conjugated lines") {
  for (int trial = 0; trial < 10; ++trial) {
    const Mat4 g = random_glplus();
    const Mat4 Jc = g * ComplexStructureJ::standard().j * g.inverse();
    const LineCongruence x = riemann_sphere(ComplexStructureJ(Jc));
    // Oracle: sample complex lines span(v, Jc v) directly and check that the
    // graph passes through each of them.
    for (int k = 0; k < 40; ++k) {
      const Vec4 v = random_unit4();
      const PluckerPoint p = plucker_of_plane(TwoPlane(v, Jc * v));
      CHECK((x.psi(p.Y) - p.X).norm() < 1e-8);
    }
    const auto rep = is_elliptic(x);
    CHECK(rep.elliptic);
    CHECK(rep.margin > 0.0);
  }
}

TEST_CASE("ellipticity of the constant map and the axis congruence") {
  const auto rep = is_elliptic(LineCongruence::constant_map(Vec3(1, 0, 0)));
  CHECK(rep.elliptic);
  CHECK(rep.margin == doctest::Approx(1.0));

  // All planes containing the first coordinate axis: X = (Y1, Y2, -Y3),
  // the graph of an isometry, so never elliptic.
  auto iso = [](const Vec3& y) { return Vec3(y[0], y[1], -y[2]); };
  const auto rep2 = is_elliptic(LineCongruence::from_function(iso, "axis"));
  CHECK_FALSE(rep2.elliptic);
  CHECK(rep2.margin <= 1e-8);
}

TEST_CASE("contraction by one half leaves margin at least one half") {
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 c = random_unit3();
    const LineCongruence x = perturbed_congruence(c, 0.15, 900 + trial);
    REQUIRE(is_elliptic(x).elliptic);
    const LineCongruence half = contract_toward(x, c, 0.5);
    const auto rep = is_elliptic(half);
    CHECK(rep.elliptic);
    CHECK(rep.margin >= 0.5);
  }
}

TEST_CASE("osculating structure of the standard sphere is the structure") {
  const Mat4 J = ComplexStructureJ::standard().j;
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  for (int k = 0; k < 10; ++k) {
    const Vec3 y = random_unit3();
    const OsculatingStructure os = osculating_structure(x, y);
    CHECK((os.jP * os.jP + Mat2::Identity()).norm() < 1e-8);
    CHECK((os.jQ * os.jQ + Mat2::Identity()).norm() < 1e-8);
    for (int c = 0; c < 2; ++c) {
      const Vec4 v = os.plane_basis.col(c);
      CHECK((os.apply_on_plane(v) - J * v).norm() < 1e-7);
      const Vec4 w = os.complement_basis.col(c);
      // Compare on the quotient: project J w onto the complement.
      const Eigen::Vector2d got = os.jQ * Eigen::Vector2d::Unit(c);
      const Eigen::Vector2d want = os.complement_basis.transpose() * (J * w);
      CHECK((got - want).norm() < 1e-7);
    }
  }
}

TEST_CASE("osculating structure of conjugated spheres matches the restriction") {
  for (int trial = 0; trial < 5; ++trial) {
    const Mat4 g = random_glplus();
    const Mat4 Jc = g * ComplexStructureJ::standard().j * g.inverse();
    const LineCongruence x = riemann_sphere(ComplexStructureJ(Jc));
    const Vec3 y = random_unit3();
    const OsculatingStructure os = osculating_structure(x, y);
    for (int c = 0; c < 2; ++c) {
      const Vec4 v = os.plane_basis.col(c);
      CHECK((os.apply_on_plane(v) - Jc * v).norm() < 1e-6);
      const Vec4 w = os.complement_basis.col(c);
      const Eigen::Vector2d got = os.jQ * Eigen::Vector2d::Unit(c);
      Eigen::Matrix<double, 4, 2> pb = os.plane_basis;
      // Quotient comparison with the plane component removed.
      const Vec4 jw = Jc * w;
      const Vec4 jw_perp = jw - pb * (pb.transpose() * jw);
      const Eigen::Vector2d want = os.complement_basis.transpose() * jw_perp;
      CHECK((got - want).norm() < 1e-6);
    }
  }
}

TEST_CASE("osculating structure is stable under small perturbations") {
  const Vec3 c(1, 0, 0);
  const Vec3 y = Vec3(0.3, -0.5, 0.81).normalized();
  const OsculatingStructure base =
      osculating_structure(LineCongruence::constant_map(c), y);
  for (double eps : {0.01, 0.05}) {
    const LineCongruence x = perturbed_congruence(c, eps, 17);
    const OsculatingStructure os = osculating_structure(x, y);
    // Compare the ambient actions; bases may differ.
    const Mat4 d = os.assemble() - base.assemble();
    CHECK(d.norm() < 6.0 * eps);
  }
}

TEST_CASE("plane through a vector on the standard sphere") {
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  const auto r = plane_through_vector(x, axis(0));
  CHECK(planes_equal(plane_of_plucker(r.plane), TwoPlane(axis(0), axis(1)), 1e-7));
  CHECK((r.jv - axis(1)).norm() < 1e-7);

  // Homogeneity: v and 2v give the same plane, jv scales.
  const Vec4 v = random_unit4();
  const auto a = plane_through_vector(x, v);
  const auto b = plane_through_vector(x, 2.0 * v);
  CHECK((a.plane.X - b.plane.X).norm() < 1e-9);
  CHECK((a.plane.Y - b.plane.Y).norm() < 1e-9);
  CHECK((b.jv - 2.0 * a.jv).norm() < 1e-8);
}

TEST_CASE("plane through a vector agrees with a dense grid bracket") {
  const Mat4 g = random_glplus(0.25);
  const Mat4 Jc = g * ComplexStructureJ::standard().j * g.inverse();
  const LineCongruence x = riemann_sphere(ComplexStructureJ(Jc));
  const Vec4 v = random_unit4();
  const auto found = plane_through_vector(x, v);

  // 200 x 100 spherical grid: all small-residual cells cluster at the answer.
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    for (int j = 1; j < 100; ++j) {
      const double phi = 2.0 * M_PI * i / 200.0;
      const double theta = M_PI * j / 100.0;
      const Vec3 y(std::sin(theta) * std::cos(phi),
                   std::sin(theta) * std::sin(phi), std::cos(theta));
      const PluckerPoint p = x.plane_at(y);
      const Mat4 W = antisymmetric_matrix(coefficients_of_split(p.X, p.Y));
      if (wedge3(v.normalized(), W).norm() < 0.03) {
        ++hits;
        CHECK(sphere_log(found.y, y).norm() < 0.2);
      }
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("nonlinear structure consistency over many vectors") {
  const Mat4 g = random_glplus(0.25);
  const Mat4 Jc = g * ComplexStructureJ::standard().j * g.inverse();
  const LineCongruence x = riemann_sphere(ComplexStructureJ(Jc));
  for (int k = 0; k < 100; ++k) {
    const Vec4 v = random_unit4();
    const auto a = plane_through_vector(x, v);
    const auto b = plane_through_vector(x, a.jv);
    CHECK((a.plane.X - b.plane.X).norm() < 1e-6);  // jv lies in the same plane
    CHECK((b.jv + v).norm() < 1e-6);               // square is minus one
  }
}

TEST_CASE("real points of the standard sphere against span(e1, e3)") {
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  const RealPointLoop loop = real_points_curve(x, TwoPlane(axis(0), axis(2)));
  CHECK(loop.closed);
  CHECK(loop.samples.size() > 100);
  const PluckerPoint rp = plucker_of_plane(TwoPlane(axis(0), axis(2)));
  for (const auto& y : loop.samples) {
    // The loop for span(e1, e3) is the circle Y2 = 0.
    CHECK(std::abs(y[1]) < 1e-8);
    CHECK(incidence(x.plane_at(y), rp, 1e-8) == Incidence::MeetInLine);
  }
}

TEST_CASE("real points rejects complex lines") {
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  CHECK_THROWS_AS(real_points_curve(x, TwoPlane(axis(0), axis(1))),
                  NotTotallyRealError);
}

TEST_CASE("real point loops on perturbed congruences pass incidence") {
  for (int trial = 0; trial < 3; ++trial) {
    const LineCongruence x =
        perturbed_congruence(random_unit3(), 0.2, 4000 + trial);
    REQUIRE(is_elliptic(x).elliptic);
    TwoPlane r(random_unit4(), random_unit4());
    const PluckerPoint rp = plucker_of_plane(r);
    const RealPointLoop loop = real_points_curve(x, r);
    CHECK(loop.closed);
    for (const auto& y : loop.samples)
      CHECK(incidence(x.plane_at(y), rp, 1e-8) == Incidence::MeetInLine);
  }
}

TEST_CASE("taming form of a constant congruence") {
  const LineCongruence x = LineCongruence::constant_map(Vec3(1, 0, 0));
  const TamingForm tf = taming_form(x);
  CHECK((tf.omega - Vec3(1, 0, 0)).norm() < 1e-12);
  Vec6 expected;
  expected << 1, 1, 0, 0, 0, 0;
  CHECK((tf.coefficients - expected).norm() < 1e-12);
  CHECK(form_value_on_plane(tf.coefficients,
                            plucker_of_plane(TwoPlane(axis(0), axis(1)))) ==
        doctest::Approx(1.0));
  CHECK(tf.min_value == doctest::Approx(1.0));
}

TEST_CASE("taming form stays positive for contracted random congruences") {
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 c = random_unit3();
    const LineCongruence x =
        contract_toward(perturbed_congruence(c, 0.3, 600 + trial), c, 0.5);
    const TamingForm tf = taming_form(x);
    CHECK(tf.min_value > 0.0);
    CHECK(is_tamed(x, tf.coefficients));
  }
}

TEST_CASE("is_tamed matches signs and the taming cone is convex") {
  const LineCongruence x = riemann_sphere(ComplexStructureJ::standard());
  Vec6 omega;
  omega << 1, 1, 0, 0, 0, 0;
  CHECK(is_tamed(x, omega));
  CHECK_FALSE(is_tamed(x, Vec6(-omega)));

  const TamingForm tf = taming_form(x);
  for (int k = 0; k < 50; ++k) {
    // A second taming form: perturb and verify, then combine.
    Vec6 other = tf.coefficients;
    for (int i = 0; i < 6; ++i) other[i] += 0.25 * urand();
    if (!is_tamed(x, other)) continue;
    const double a = urand(0.1, 2.0), b = urand(0.1, 2.0);
    CHECK(is_tamed(x, Vec6(a * tf.coefficients + b * other)));
  }
}

TEST_CASE("deform contracts to the taming center and keeps ellipticity") {
  const Vec3 c = random_unit3();
  const LineCongruence x = perturbed_congruence(c, 0.25, 321);
  REQUIRE(is_elliptic(x).elliptic);
  const TamingForm tf = taming_form(x);

  const LineCongruence x0 = deform(x, 0.0);
  const Vec3 probe = random_unit3();
  CHECK((x0.psi(probe) - x.psi(probe)).norm() < 1e-12);

  const LineCongruence x1 = deform(x, 1.0);
  CHECK((x1.psi(probe) - tf.omega).norm() < 1e-9);

  double prev = is_elliptic(x).margin;
  for (double t : {0.25, 0.5, 0.75, 1.0}) {
    const auto rep = is_elliptic(deform(x, t));
    CHECK(rep.elliptic);
    CHECK(rep.margin >= prev - 1e-9);
    prev = rep.margin;
  }
}

TEST_CASE("hemisphere and antipode-free image for elliptic congruences") {
  for (int trial = 0; trial < 5; ++trial) {
    const LineCongruence x =
        perturbed_congruence(random_unit3(), 0.3, 52 + trial);
    REQUIRE(is_elliptic(x).elliptic);
    const TamingForm tf = taming_form(x);
    CHECK(tf.min_value > 0.0);  // image in the open hemisphere about omega
    const auto& pts = x.samples();
    for (size_t i = 0; i < pts.size(); i += 37) {
      for (size_t j = i + 1; j < pts.size(); j += 211) {
        CHECK((x.psi(pts[i]) + x.psi(pts[j])).norm() > 1e-6);
      }
    }
  }
}

TEST_CASE("distinct planes of a compact elliptic congruence are transverse") {
  const LineCongruence x = perturbed_congruence(random_unit3(), 0.25, 8);
  REQUIRE(is_elliptic(x).elliptic);
  const auto& pts = x.samples();
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = pts[static_cast<size_t>(urand(0, 1) * (pts.size() - 1))];
    const Vec3 b = pts[static_cast<size_t>(urand(0, 1) * (pts.size() - 1))];
    if ((a - b).norm() < 1e-2) continue;
    CHECK(incidence(x.plane_at(a), x.plane_at(b), 1e-12) ==
          Incidence::Transverse);
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("ellipticity agrees with definiteness of the restricted form") {
  // Elliptic fixture: all tangent Gram matrices positive definite.
  const LineCongruence x = perturbed_congruence(random_unit3(), 0.25, 99);
  const auto rep = is_elliptic(x);
  bool all_definite = true;
  for (size_t i = 0; i < x.samples().size(); i += 101) {
    try {
      osculating_structure(x, x.samples()[i]);
    } catch (const NotEllipticError&) {
      all_definite = false;
    }
  }
  CHECK(rep.elliptic == all_definite);

  // Non-elliptic fixture: the isometry graph must fail definiteness.
  auto iso = [](const Vec3& y) { return Vec3(y[0], y[1], -y[2]); };
  const LineCongruence bad = LineCongruence::from_function(iso, "axis");
  CHECK_FALSE(is_elliptic(bad).elliptic);
  bool definite_somewhere = false;
  for (size_t i = 0; i < bad.samples().size(); i += 401) {
    try {
      osculating_structure(bad, bad.samples()[i]);
      definite_somewhere = true;
    } catch (const NotEllipticError&) {
    }
  }
  CHECK_FALSE(definite_somewhere);
}

TEST_CASE("assembled osculating structure is first-order tangent") {
  const LineCongruence x = perturbed_congruence(Vec3(1, 0, 0), 0.15, 5);
  const Vec3 y = Vec3(0.2, 0.9, -0.37).normalized();
  const OsculatingStructure os = osculating_structure(x, y);
  const Mat4 Jfull = os.assemble();
  CHECK((Jfull * Jfull + Mat4::Identity()).norm() < 1e-7);
  const LineCongruence sphere = riemann_sphere(ComplexStructureJ(Jfull));

  // Passes through the same plane.
  CHECK((sphere.psi(y) - x.psi(y)).norm() < 1e-7);
  // First-order tangency: psi values agree to second order along the sphere.
  Vec3 t1, t2;
  tangent_frame(y, t1, t2);
  for (double h : {1e-3, 2e-3}) {
    const Vec3 yh = sphere_exp(y, h * (0.6 * t1 + 0.8 * t2));
    CHECK((sphere.psi(yh) - x.psi(yh)).norm() < 20.0 * h * h);
  }
}

TEST_CASE("grid congruences interpolate and report facet derivatives") {
  const Icosphere& sph = Icosphere::level(3);
  std::vector<Vec3> vals(sph.vertices.size());
  for (size_t i = 0; i < vals.size(); ++i) {
    const Vec3& y = sph.vertices[i];
    const Vec3 w = Vec3(0.2 * y[1], -0.1 * y[0], 0.15 * y[2]);
    vals[i] = sphere_exp(Vec3(1, 0, 0), w - Vec3(1, 0, 0).dot(w) * Vec3(1, 0, 0));
  }
  const LineCongruence x = LineCongruence::from_grid(3, vals);
  CHECK((x.psi(sph.vertices[7]) - vals[7]).norm() < 1e-12);
  const auto rep = is_elliptic(x);
  CHECK(rep.elliptic);
}
