#include "pseudocurve/darboux.hpp"

#include <cmath>
#include <random>

namespace pseudocurve {

using sym::Expr;
using sym::Form1;
using sym::Form2;

Chart builtin_chart(const std::string& name) {
  if (name == "flat") return Chart::flat();
  if (name == "darboux2")
    return Chart({ChartTerm{{0, 0, 1, 1, 0, 0}, Complex(1, 0)}}, 1e9, 6,
                 "darboux2");
  throw UnknownNameError("builtin_chart: unknown builtin " + name);
}

namespace {

Complex hyperbolic_rhs(Complex Z, Complex W, Complex P, Complex dZ) {
  const double D = 1.0 - std::norm(Z);
  return (W * std::conj(Z) / D + P) * dZ + (std::conj(W) / D) * std::conj(dZ);
}

}  // namespace

Case3Curve case3_integrate(const PowerSeries& pfun, Complex w0,
                           const DiskGrid& zgrid, const Case3Options& opt) {
  if (zgrid.radius >= 1.0 - 1e-6)
    throw DomainEscapeError("case3_integrate: grid must stay in the unit disk");

  CurveField f;
  f.grid = zgrid;
  f.z = zgrid.nodes;
  f.w.assign(zgrid.size(), Complex(0, 0));
  f.p.assign(zgrid.size(), Complex(0, 0));
  f.w[0] = w0;
  f.p[0] = pfun.eval(Complex(0, 0));

  const int na = zgrid.angles();
#pragma omp parallel for schedule(static)
  for (int k = 0; k < na; ++k) {
    const double phi = k * zgrid.dphi();
    const Complex dir(std::cos(phi), std::sin(phi));
    Complex W = w0;
    double t = 0.0;
    for (int j = 1; j <= zgrid.n; ++j) {
      const double t1 = zgrid.ring_radius(j);
      const double h = (t1 - t) / opt.substeps;
      for (int s = 0; s < opt.substeps; ++s) {
        auto rhs = [&](double tt, Complex Wv) {
          const Complex Z = tt * dir;
          return hyperbolic_rhs(Z, Wv, pfun.eval(Z), dir);
        };
        const Complex k1 = rhs(t, W);
        const Complex k2 = rhs(t + 0.5 * h, W + 0.5 * h * k1);
        const Complex k3 = rhs(t + 0.5 * h, W + 0.5 * h * k2);
        const Complex k4 = rhs(t + h, W + h * k3);
        W += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
      }
      const int i = zgrid.index(j, k);
      f.w[i] = W;
      f.p[i] = pfun.eval(zgrid.nodes[i]);
    }
  }

  // Path consistency spot check: reach a handful of rim nodes through the
  // neighboring ray plus an azimuthal arc.
  const int n = zgrid.n;
  for (int k = 0; k < na; k += std::max(1, na / 8)) {
    const int kprev = (k + na - 1) % na;
    const double r = zgrid.ring_radius(n);
    Complex W = f.w[zgrid.index(n, kprev)];
    const double phi0 = kprev * zgrid.dphi();
    const double dphi = zgrid.dphi();
    const int steps = 16;
    double ph = phi0;
    const double h = dphi / steps;
    for (int s = 0; s < steps; ++s) {
      auto rhs = [&](double phv, Complex Wv) {
        const Complex Z = r * Complex(std::cos(phv), std::sin(phv));
        const Complex dZ = Complex(0, 1) * Z;  // dZ/dphi
        return hyperbolic_rhs(Z, Wv, pfun.eval(Z), dZ);
      };
      const Complex k1 = rhs(ph, W);
      const Complex k2 = rhs(ph + 0.5 * h, W + 0.5 * h * k1);
      const Complex k3 = rhs(ph + 0.5 * h, W + 0.5 * h * k2);
      const Complex k4 = rhs(ph + h, W + h * k3);
      W += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ph += h;
    }
    if (std::abs(W - f.w[zgrid.index(n, k)]) > 1e-6)
      throw PathInconsistencyError(
          "case3_integrate: homotopic paths disagree beyond tolerance");
  }

  Case3Curve out;
  out.field = std::move(f);
  out.residual = case3_residual(out.field);
  return out;
}

double case3_residual(const CurveField& field) {
  const DiskGrid& g = field.grid;
  const CField wzb = g.d_sigmabar(field.w);
  double worst = 0.0;
  for (int j = 1; j <= g.n; ++j) {
    if (!g.interior(j)) continue;
    for (int k = 0; k < g.angles(); ++k) {
      const int i = g.index(j, k);
      const double D = 1.0 - std::norm(field.z[i]);
      worst = std::max(worst, std::abs(wzb[i] - std::conj(field.w[i]) / D));
    }
  }
  return worst;
}

CurveField case3_symmetry(const PowerSeries& fholo, const CurveField& field) {
  const PowerSeries fp = fholo.derivative();
  const PowerSeries fpp = fp.derivative();
  CurveField out = field;
  for (int i = 0; i < field.grid.size(); ++i) {
    const Complex Z = field.z[i];
    if (std::abs(Z) >= 1.0 - 1e-6)
      throw DomainEscapeError("case3_symmetry: sample outside the unit disk");
    const double D = 1.0 - std::norm(Z);
    const Complex f = fholo.eval(Z);
    const Complex df = fp.eval(Z);
    const Complex ddf = fpp.eval(Z);
    const Complex g = 2.0 * Z * f + Z * Z * df;        // d/dZ (Z^2 f)
    const Complex r = Z * Z * f + std::conj(g);
    const Complex rbar_z = 2.0 * f + 4.0 * Z * df + Z * Z * ddf;  // d/dZ conj(r)
    const Complex a = (std::conj(r) + r * std::conj(Z)) / D;
    const Complex a_z = (rbar_z + g * std::conj(Z)) / D +
                        (std::conj(r) + r * std::conj(Z)) * std::conj(Z) / (D * D);
    out.w[i] = field.w[i] + a;
    out.p[i] = field.p[i] + a_z - a * std::conj(Z) / D;
  }
  return out;
}

Coframe flat_coframe() {
  Coframe cf;
  cf.theta = sym::d_w() - sym::ex_p() * sym::d_z();
  cf.omega = sym::d_z();
  cf.pi = sym::d_p();
  return cf;
}

Complex case4_constraint(const Expr& F, const ChartPoint& at) {
  const Expr D = sym::ex_one() - sym::ex_p() * sym::ex_p().conjugate();
  const Expr invD = D.reciprocal();
  const Expr wbar = sym::ex_w().conjugate();
  const Expr res = F.wirtinger(5) + F.conjugate() * F.wirtinger(1) +
                   (wbar * invD) * F.wirtinger(2) +
                   (sym::ex_p() * wbar * invD) * F.wirtinger(3);
  return res.eval(at.z, at.w, at.p);
}

std::vector<ChartPoint> default_chart_samples(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.45, 0.45);
  std::uniform_real_distribution<double> dp(-0.55, 0.55);
  std::vector<ChartPoint> pts(count);
  for (auto& p : pts) {
    p.z = Complex(d(rng), d(rng));
    p.w = Complex(d(rng), d(rng));
    do {
      p.p = Complex(dp(rng), dp(rng));
    } while (std::abs(p.p) >= 0.8);
  }
  return pts;
}

namespace {

// Coefficient rows of (theta, thetabar, omega, omegabar, pi, pibar) on the
// coordinate differentials, at one sample.
Eigen::Matrix<Complex, 6, 6> coframe_matrix(const Coframe& cf,
                                            const ChartPoint& at) {
  Eigen::Matrix<Complex, 6, 6> C;
  const Form1 rows[3] = {cf.theta, cf.omega, cf.pi};
  for (int r = 0; r < 3; ++r) {
    const auto v = rows[r].eval(at.z, at.w, at.p);
    const auto vb = rows[r].conjugate().eval(at.z, at.w, at.p);
    for (int i = 0; i < 6; ++i) {
      C(2 * r, i) = v[i];
      C(2 * r + 1, i) = vb[i];
    }
  }
  return C;
}

}  // namespace

Coframe case4_coframe(const Expr& F, const std::vector<ChartPoint>& samples) {
  const std::vector<ChartPoint> pts =
      samples.empty() ? default_chart_samples(100) : samples;
  for (const auto& at : pts) {
    const Complex r = case4_constraint(F, at);
    if (std::abs(r) > 1e-8)
      throw ConstraintViolatedError(
          "case4_coframe: constraint residual " + std::to_string(std::abs(r)) +
          " at z = " + std::to_string(at.z.real()) + "+" +
          std::to_string(at.z.imag()) + "i");
  }

  const Expr D = sym::ex_one() - sym::ex_p() * sym::ex_p().conjugate();
  const Expr invD = D.reciprocal();
  Coframe cf;
  cf.theta = sym::d_w() -
             (sym::ex_w() * sym::ex_p().conjugate() * invD - sym::ex_z()) *
                 sym::d_p() -
             (sym::ex_w().conjugate() * invD) * sym::d_pbar();
  cf.omega = sym::d_z() - F * sym::d_p();
  cf.pi = sym::d_p();

  for (const auto& at : pts) {
    const auto C = coframe_matrix(cf, at);
    if (std::abs(Eigen::Matrix<Complex, 6, 6>(C).determinant()) < 1e-10)
      throw DegenerateError("case4_coframe: coframe degenerates at a sample");
  }
  return cf;
}

double duality_check(const Expr& F, const std::vector<ChartPoint>& samples) {
  const std::vector<ChartPoint> pts =
      samples.empty() ? default_chart_samples(100) : samples;
  const Coframe cf = case4_coframe(F, pts);

  // Dual-structure 1-forms in the (W, Z, P) coordinates, pulled back through
  // (W, Z, P) = (w, p, -z): the contact form lands on theta exactly, dZ on
  // pi, and dP on -omega when F vanishes.
  const Expr D = sym::ex_one() - sym::ex_p() * sym::ex_p().conjugate();
  const Expr invD = D.reciprocal();
  Form1 theta_pb = sym::d_w() -
                   (sym::ex_w() * sym::ex_p().conjugate() * invD - sym::ex_z()) *
                       sym::d_p() -
                   (sym::ex_w().conjugate() * invD) * sym::d_pbar();
  Form1 omega_pb = sym::d_p();
  Form1 pi_pb;
  pi_pb.c[0] = Expr::constant(Complex(-1, 0));  // -dz

  double worst = 0.0;
  for (const auto& at : pts) {
    Eigen::Matrix<Complex, 6, 3> A, B;
    const Form1 acols[3] = {theta_pb, omega_pb, pi_pb};
    const Form1 bcols[3] = {cf.theta, cf.pi,
                            Expr::constant(Complex(-1, 0)) * cf.omega};
    for (int c = 0; c < 3; ++c) {
      const auto av = acols[c].eval(at.z, at.w, at.p);
      const auto bv = bcols[c].eval(at.z, at.w, at.p);
      for (int i = 0; i < 6; ++i) {
        A(i, c) = av[i];
        B(i, c) = bv[i];
      }
    }
    // Largest principal-angle sine between the column spans.
    const Eigen::HouseholderQR<Eigen::Matrix<Complex, 6, 3>> qa(A), qb(B);
    const Eigen::MatrixXcd Qa =
        qa.householderQ() * Eigen::MatrixXcd::Identity(6, 3);
    const Eigen::MatrixXcd Qb =
        qb.householderQ() * Eigen::MatrixXcd::Identity(6, 3);
    const Eigen::MatrixXcd R = Qa - Qb * (Qb.adjoint() * Qa);
    worst = std::max(worst, R.jacobiSvd().singularValues()(0));
  }
  return worst;
}

StructureFit structure_fit(const Coframe& cf,
                           const std::vector<ChartPoint>& samples) {
  StructureFit out;
  const Form2 dtheta = sym::exterior_derivative(cf.theta);
  const Form2 domega = sym::exterior_derivative(cf.omega);
  const Form2 dpi = sym::exterior_derivative(cf.pi);

  for (const auto& at : samples) {
    const auto C = coframe_matrix(cf, at);
    const Complex det = Eigen::Matrix<Complex, 6, 6>(C).determinant();
    if (std::abs(det) < 1e-10)
      throw DegenerateError("structure_fit: coframe wedge vanishes at a sample");
    // Dual frame: columns of C^{-1} pair with the coframe rows.
    const Eigen::Matrix<Complex, 6, 6> E = C.inverse();

    auto to_coframe = [&](const Form2& f) {
      const auto v = f.eval(at.z, at.w, at.p);
      Eigen::Matrix<Complex, 6, 6> full = Eigen::Matrix<Complex, 6, 6>::Zero();
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
          full(i, j) = v[Form2::pair_index(i, j)];
          full(j, i) = -v[Form2::pair_index(i, j)];
        }
      return Eigen::Matrix<Complex, 6, 6>(E.transpose() * full * E);
    };
    const auto Mtheta = to_coframe(dtheta);
    const auto Momega = to_coframe(domega);
    const auto Mpi = to_coframe(dpi);

    // Unknowns: alpha, beta, gamma, delta, epsilon (6 coframe coefficients
    // each) then S1, S2, T2, T3, U2, U3, V2, V3.
    constexpr int nu = 38;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(45, nu);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(45);
    const int iAlpha = 0, iBeta = 6, iGamma = 12, iDelta = 18, iEps = 24;
    const int iS1 = 30, iS2 = 31, iT2 = 32, iT3 = 33, iU2 = 34, iU3 = 35,
              iV2 = 36, iV3 = 37;
    auto row = [&](int eq, int a2, int b2) {
      return eq * 15 + Form2::pair_index(a2, b2);
    };
    // Coframe index names: 0 theta, 1 thetabar, 2 omega, 3 omegabar,
    // 4 pi, 5 pibar.
    // Equation 1: dtheta + pi ^ omega = -alpha ^ theta + tau1 ^ thetabar.
    for (int a2 = 0; a2 < 6; ++a2)
      for (int b2 = a2 + 1; b2 < 6; ++b2) b(row(0, a2, b2)) = Mtheta(a2, b2);
    b(row(0, 2, 4)) -= 1.0;  // pi ^ omega = -(omega ^ pi)
    for (int a2 = 1; a2 < 6; ++a2) A(row(0, 0, a2), iAlpha + a2) = 1.0;
    A(row(0, 1, 3), iT2) = -1.0;
    A(row(0, 1, 5), iT3) = -1.0;

    // Equation 2: domega = -beta ^ theta - gamma ^ omega - pi ^ sigma
    //             + tau2 ^ thetabar.
    for (int a2 = 0; a2 < 6; ++a2)
      for (int b2 = a2 + 1; b2 < 6; ++b2) b(row(1, a2, b2)) = Momega(a2, b2);
    for (int a2 = 1; a2 < 6; ++a2) A(row(1, 0, a2), iBeta + a2) = 1.0;
    for (int a2 = 0; a2 < 6; ++a2) {
      if (a2 == 2) continue;
      if (a2 < 2)
        A(row(1, a2, 2), iGamma + a2) = -1.0;
      else
        A(row(1, 2, a2), iGamma + a2) = 1.0;
    }
    A(row(1, 1, 4), iS1) = 1.0;
    A(row(1, 3, 4), iS2) = 1.0;
    A(row(1, 1, 3), iU2) = -1.0;
    A(row(1, 1, 5), iU3) = -1.0;

    // Equation 3: dpi = -delta ^ theta - eps ^ omega - (alpha - gamma) ^ pi
    //             + tau3 ^ thetabar.
    for (int a2 = 0; a2 < 6; ++a2)
      for (int b2 = a2 + 1; b2 < 6; ++b2) b(row(2, a2, b2)) = Mpi(a2, b2);
    for (int a2 = 1; a2 < 6; ++a2) A(row(2, 0, a2), iDelta + a2) = 1.0;
    for (int a2 = 0; a2 < 6; ++a2) {
      if (a2 == 2) continue;
      if (a2 < 2)
        A(row(2, a2, 2), iEps + a2) = -1.0;
      else
        A(row(2, 2, a2), iEps + a2) = 1.0;
    }
    for (int a2 = 0; a2 < 6; ++a2) {
      if (a2 == 4) continue;
      const double sgn = a2 < 4 ? -1.0 : 1.0;
      const int r2 = a2 < 4 ? row(2, a2, 4) : row(2, 4, a2);
      A(r2, iAlpha + a2) = sgn;
      A(r2, iGamma + a2) = -sgn;
    }
    A(row(2, 1, 3), iV2) = -1.0;
    A(row(2, 1, 5), iV3) = -1.0;

    const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
    const double resid = (A * x - b).norm();

    StructureFitSample s;
    s.at = at;
    for (int c = 0; c < 5; ++c)
      for (int i = 0; i < 6; ++i) s.connection(i, c) = x(6 * c + i);
    s.S1 = x(iS1);
    s.S2 = x(iS2);
    s.T2 = x(iT2);
    s.T3 = x(iT3);
    s.U2 = x(iU2);
    s.U3 = x(iU3);
    s.V2 = x(iV2);
    s.V3 = x(iV3);
    s.residual = resid;
    out.samples.push_back(s);
    out.max_residual = std::max(out.max_residual, resid);
  }
  return out;
}

}  // namespace pseudocurve
