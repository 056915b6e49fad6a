#include "pseudocurve/chart.hpp"

#include <cmath>
#include <memory>

namespace pseudocurve {

namespace {

Complex ipow(Complex b, int e) {
  Complex r(1, 0);
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

Chart::Chart(std::vector<ChartTerm> terms, double radius, int degree,
             std::string builtin)
    : terms_(std::move(terms)),
      radius_(radius),
      degree_(degree),
      builtin_(std::move(builtin)) {}

Chart Chart::flat() { return Chart({}, 1e9, 6, "flat"); }

Chart Chart::monomial(const std::array<int, 6>& exp, Complex coeff,
                      double radius) {
  return Chart({ChartTerm{exp, coeff}}, radius);
}

Complex Chart::eval(Complex z, Complex w, Complex p) const {
  const Complex vars[6] = {z, std::conj(z), w, std::conj(w), p, std::conj(p)};
  Complex acc(0, 0);
  for (const auto& t : terms_) {
    Complex m = t.coeff;
    for (int v = 0; v < 6; ++v)
      if (t.exp[v] > 0) m *= ipow(vars[v], t.exp[v]);
    acc += m;
  }
  return acc;
}

Chart Chart::partial(int var) const {
  std::vector<ChartTerm> out;
  for (const auto& t : terms_) {
    if (t.exp[var] == 0) continue;
    ChartTerm d = t;
    d.coeff *= static_cast<double>(t.exp[var]);
    d.exp[var] -= 1;
    out.push_back(d);
  }
  return Chart(std::move(out), radius_, degree_);
}

double Chart::gradient_bound(double r) const {
  double acc = 0.0;
  for (int v = 0; v < 6; ++v) {
    const Chart d = partial(v);
    for (const auto& t : d.terms()) {
      int total = 0;
      for (int k = 0; k < 6; ++k) total += t.exp[k];
      acc += std::abs(t.coeff) * std::pow(r, total);
    }
  }
  return acc;
}

void Chart::validate() const {
  for (const auto& t : terms_) {
    int total = 0;
    for (int v = 0; v < 6; ++v) total += t.exp[v];
    if (total < 2)
      throw DomainError("Chart: Q and dQ must vanish at the origin");
  }
}

bool pde_pair_elliptic(const PdePairLinearization& lin) {
  Eigen::Matrix<double, 2, 4> stacked;
  stacked << lin.df1(0, 0), lin.df1(0, 1), lin.df1(1, 0), lin.df1(1, 1),
      lin.df2(0, 0), lin.df2(0, 1), lin.df2(1, 0), lin.df2(1, 1);
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(stacked);
  if (svd.singularValues()(1) < 1e-10 * std::max(1.0, svd.singularValues()(0)))
    throw RankDeficientError("pde_pair_elliptic: equations are dependent");

  // det(dF^i/dp^j_k xi_k) = a xi1^2 + b xi1 xi2 + c xi2^2
  const auto& A = lin.df1;
  const auto& B = lin.df2;
  const double a = A(0, 0) * B(1, 0) - A(1, 0) * B(0, 0);
  const double c = A(0, 1) * B(1, 1) - A(1, 1) * B(0, 1);
  const double b =
      A(0, 0) * B(1, 1) + A(0, 1) * B(1, 0) - A(1, 0) * B(0, 1) - A(1, 1) * B(0, 0);
  if (a == 0.0 && b == 0.0 && c == 0.0) return false;
  return b * b - 4.0 * a * c < 0.0;
}

namespace {

// Complex graph derivative from the four real slots p^j_k (u^j by x^k).
Complex wz_from_slots(const Mat2& pjk) {
  const Complex wx(pjk(0, 0), pjk(1, 0));
  const Complex wy(pjk(0, 1), pjk(1, 1));
  return 0.5 * (wx - Complex(0, 1) * wy);
}
Complex wzbar_from_slots(const Mat2& pjk) {
  const Complex wx(pjk(0, 0), pjk(1, 0));
  const Complex wy(pjk(0, 1), pjk(1, 1));
  return 0.5 * (wx + Complex(0, 1) * wy);
}

}  // namespace

PdePairLinearization linearize_chart(const Chart& c, Complex z0, Complex w0,
                                     Complex p0) {
  const Complex q0 = c.eval(z0, w0, p0);
  // Base real slots of the plane dw = p0 dz + q0 dzbar.
  Mat2 base;
  const Complex wx = p0 + q0;
  const Complex wy = Complex(0, 1) * (p0 - q0);
  base << wx.real(), wy.real(), wx.imag(), wy.imag();

  auto F = [&](const Mat2& slots) -> Complex {
    const Complex wz = wz_from_slots(slots);
    const Complex wzb = wzbar_from_slots(slots);
    return wzb - c.eval(z0, w0, wz);
  };

  PdePairLinearization lin;
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      Mat2 up = base, dn = base;
      up(j, k) += h;
      dn(j, k) -= h;
      const Complex d = (F(up) - F(dn)) / (2.0 * h);
      lin.df1(j, k) = d.real();
      lin.df2(j, k) = d.imag();
    }
  }
  return lin;
}

TwoPlane graph_plane(Complex p, Complex q) {
  const Complex wx = p + q;                  // dw along dx1
  const Complex wy = Complex(0, 1) * (p - q);  // dw along dx2
  const Vec4 u(1, 0, wx.real(), wx.imag());
  const Vec4 v(0, 1, wy.real(), wy.imag());
  return TwoPlane(u, v);
}

namespace {

// Plane of the reciprocal chart near p = infinity: s = 1/p, parameterized
// over the w-axis plane. Solves dz + (s q) conj(dz) = s dw.
TwoPlane reciprocal_plane(Complex s, Complex q) {
  const Complex cc = s * q;
  if (std::norm(cc) > 0.98)
    throw NotGraphError("fiber_congruence: fiber degenerates near p = infinity");
  const double denom = 1.0 - std::norm(cc);
  auto dz_for = [&](Complex dw) {
    const Complex b = s * dw;
    return (b - cc * std::conj(b)) / denom;
  };
  const Complex dz1 = dz_for(Complex(1, 0));
  const Complex dz2 = dz_for(Complex(0, 1));
  const Vec4 u(dz1.real(), dz1.imag(), 1, 0);
  const Vec4 v(dz2.real(), dz2.imag(), 0, 1);
  return TwoPlane(u, v);
}

struct FiberSample {
  Complex p;       // finite chart value; ignored when reciprocal
  Complex s;       // reciprocal coordinate when reciprocal = true
  bool reciprocal = false;
  Vec3 Y, X;
};

}  // namespace

LineCongruence fiber_congruence(const Chart& c, Complex z0, Complex w0,
                                const FiberOptions& opt) {
  auto chart = std::make_shared<const Chart>(c);
  auto plane_for_p = [chart, z0, w0](Complex p) {
    return plucker_of_plane(graph_plane(p, chart->eval(z0, w0, p)));
  };
  auto plane_for_s = [chart, z0, w0](Complex s) {
    // q at p = 1/s; only used when Q stays bounded there.
    const Complex p = Complex(1, 0) / s;
    return plucker_of_plane(reciprocal_plane(s, chart->eval(z0, w0, p)));
  };

  std::vector<FiberSample> samples;
  bool defect = false;
  const int N = opt.cells;
  if (opt.p_radius > 0.0) {
    for (int a = 0; a < N; ++a) {
      for (int b = 0; b < N; ++b) {
        const double re = (-1.0 + (2.0 * a + 1.0) / N) * opt.p_radius;
        const double im = (-1.0 + (2.0 * b + 1.0) / N) * opt.p_radius;
        const Complex p(re, im);
        if (std::abs(p) > opt.p_radius) continue;
        FiberSample fs;
        fs.p = p;
        const PluckerPoint pt = plane_for_p(p);
        fs.Y = pt.Y;
        fs.X = pt.X;
        samples.push_back(fs);
      }
    }
  } else {
    // Stereographic sphere grid; the half with |p| > 1 runs through the
    // reciprocal chart.
    for (int a = 0; a < N; ++a) {
      for (int b = 0; b < 2 * N; ++b) {
        const double theta = 3.14159265358979323846 * (a + 0.5) / N;
        const double phi = 3.14159265358979323846 * (b + 0.5) / N;
        const double t = std::tan(theta / 2.0);
        FiberSample fs;
        try {
          if (t <= 1.0) {
            fs.p = t * Complex(std::cos(phi), std::sin(phi));
            const PluckerPoint pt = plane_for_p(fs.p);
            fs.Y = pt.Y;
            fs.X = pt.X;
          } else {
            fs.reciprocal = true;
            fs.s = (1.0 / t) * Complex(std::cos(phi), -std::sin(phi));
            const PluckerPoint pt = plane_for_s(fs.s);
            fs.Y = pt.Y;
            fs.X = pt.X;
          }
        } catch (const DomainError&) {
          defect = true;
          continue;
        }
        samples.push_back(fs);
      }
    }
  }
  if (samples.empty())
    throw DomainError("fiber_congruence: no valid fiber samples");

  // Fold detection: the p -> Y map must preserve orientation everywhere for
  // the fiber to stay a graph over S2-.
  for (const auto& fs : samples) {
    if (fs.reciprocal) continue;
    const double h = 1e-5;
    const PluckerPoint yr0 = plane_for_p(fs.p - Complex(h, 0));
    const PluckerPoint yr1 = plane_for_p(fs.p + Complex(h, 0));
    const PluckerPoint yi0 = plane_for_p(fs.p - Complex(0, h));
    const PluckerPoint yi1 = plane_for_p(fs.p + Complex(0, h));
    const Vec3 du = (yr1.Y - yr0.Y) / (2 * h);
    const Vec3 dv = (yi1.Y - yi0.Y) / (2 * h);
    if (du.cross(dv).dot(fs.Y) <= 0.0) {
      defect = true;
      break;
    }
  }

  auto shared = std::make_shared<std::vector<FiberSample>>(std::move(samples));
  auto psi = [shared, plane_for_p, plane_for_s](const Vec3& y) -> Vec3 {
    // Nearest sample as the seed, then Gauss-Newton in the right chart.
    size_t best = 0;
    double bd = -2.0;
    for (size_t i = 0; i < shared->size(); ++i) {
      const double d = (*shared)[i].Y.dot(y);
      if (d > bd) {
        bd = d;
        best = i;
      }
    }
    const FiberSample& seed = (*shared)[best];
    auto Ymap = [&](Complex u) {
      return seed.reciprocal ? plane_for_s(u).Y : plane_for_p(u).Y;
    };
    Complex u = seed.reciprocal ? seed.s : seed.p;
    double res = 1e300;
    for (int it = 0; it < 60; ++it) {
      const Vec3 r = Ymap(u) - y;
      res = r.norm();
      if (res < 1e-12) break;
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      const Vec3 dre = (Ymap(u + h) - Ymap(u - h)) / (2 * h);
      const Vec3 dim = (Ymap(u + Complex(0, h)) - Ymap(u - Complex(0, h))) / (2 * h);
      Eigen::Matrix<double, 3, 2> Jm;
      Jm.col(0) = dre;
      Jm.col(1) = dim;
      const Eigen::Vector2d step = Jm.colPivHouseholderQr().solve(-r);
      double len = step.norm();
      const double cap = 0.5 * std::max(1.0, std::abs(u));
      const Eigen::Vector2d s = len > cap ? Eigen::Vector2d(step * (cap / len)) : step;
      u += Complex(s[0], s[1]);
    }
    if (res > 1e-8)
      throw NotGraphError("fiber_congruence: no fiber plane over this point");
    return seed.reciprocal ? plane_for_s(u).X : plane_for_p(u).X;
  };

  LineCongruence x = LineCongruence::from_function(psi, "fiber");
  std::vector<Vec3> ys(shared->size());
  for (size_t i = 0; i < shared->size(); ++i) ys[i] = (*shared)[i].Y;
  x.set_samples(std::move(ys));
  x.set_full_domain(opt.p_radius <= 0.0 && !defect);
  x.set_graph_defect(defect);
  return x;
}

double chart_residual(const Chart& c, const CurveField& field) {
  const DiskGrid& g = field.grid;
  if (g.n < 8) throw GridTooCoarseError("chart_residual: fewer than 8 rings");
  for (int i = 0; i < g.size(); ++i)
    if (std::abs(field.z[i] - g.nodes[i]) > 1e-10)
      throw DomainError("chart_residual: field is not in the gauge z = sigma");
  const CField wz = g.d_sigma(field.w);
  const CField wzb = g.d_sigmabar(field.w);
  double worst = 0.0;
  for (int j = 1; j <= g.n; ++j) {
    if (!g.interior(j)) continue;
    for (int k = 0; k < g.angles(); ++k) {
      const int i = g.index(j, k);
      const Complex q = c.eval(field.z[i], field.w[i], wz[i]);
      worst = std::max(worst, std::abs(wzb[i] - q));
    }
  }
  return worst;
}

}  // namespace pseudocurve
