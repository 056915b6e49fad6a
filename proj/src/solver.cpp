#include "pseudocurve/solver.hpp"

#include <algorithm>
#include <cmath>

namespace pseudocurve {

Complex PowerSeries::eval(Complex s) const {
  Complex acc(0, 0);
  for (size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
  return acc;
}

PowerSeries PowerSeries::derivative() const {
  PowerSeries d;
  if (c.size() <= 1) {
    d.c = {Complex(0, 0)};
    return d;
  }
  d.c.resize(c.size() - 1);
  for (size_t k = 1; k < c.size(); ++k)
    d.c[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

PowerSeries PowerSeries::antiderivative() const {
  PowerSeries a;
  a.c.assign(c.size() + 1, Complex(0, 0));
  for (size_t k = 0; k < c.size(); ++k)
    a.c[k + 1] = c[k] / static_cast<double>(k + 1);
  return a;
}

PowerSeries PowerSeries::product(const PowerSeries& other) const {
  PowerSeries p;
  if (c.empty() || other.c.empty()) return p;
  p.c.assign(c.size() + other.c.size() - 1, Complex(0, 0));
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < other.c.size(); ++j) p.c[i + j] += c[i] * other.c[j];
  return p;
}

void HolomorphicData::validate(double radius) const {
  auto check = [radius](const PowerSeries& s, const char* what) {
    double r = 1.0;
    for (size_t k = 0; k < s.c.size(); ++k) {
      if (!std::isfinite(s.c[k].real()) || !std::isfinite(s.c[k].imag()) ||
          std::abs(s.c[k]) * r > 1e12)
        throw DomainError(std::string("HolomorphicData: ") + what +
                          " series does not stay bounded on the grid radius");
      r *= radius;
    }
  };
  check(Z, "Z");
  check(P, "P");
}

namespace {

// Cubic Lagrange interpolation of per-ray values D_j at radii r_j
// (index 0 is the center, r_0 = 0).
Complex ray_interp(const std::vector<double>& radii,
                   const std::vector<Complex>& vals, double t) {
  const int n = static_cast<int>(radii.size());
  constexpr int W = 4;
  int j = 0;
  while (j + 1 < n && radii[j + 1] < t) ++j;
  int lo = std::clamp(j - 1, 0, n - W);
  Complex acc(0, 0);
  for (int a = 0; a < W; ++a) {
    double L = 1.0;
    for (int b = 0; b < W; ++b) {
      if (a == b) continue;
      L *= (t - radii[lo + b]) / (radii[lo + a] - radii[lo + b]);
    }
    acc += L * vals[lo + a];
  }
  return acc;
}

struct ChartPartials {
  Chart Qz, Qzb, Qw, Qwb, Qp, Qpb;
  explicit ChartPartials(const Chart& c)
      : Qz(c.partial(0)),
        Qzb(c.partial(1)),
        Qw(c.partial(2)),
        Qwb(c.partial(3)),
        Qp(c.partial(4)),
        Qpb(c.partial(5)) {}
};

}  // namespace

SolveResult solve_curve(const Chart& c, const HolomorphicData& data,
                        const DiskGrid& grid, const SolveOptions& opt) {
  data.validate(grid.radius);
  c.validate();
  const double rho = c.radius();
  const int N = grid.size();
  const int na = grid.angles();
  const PowerSeries Zp = data.Z.derivative();
  const PowerSeries whol = data.P.product(Zp).antiderivative();
  const ChartPartials d(c);

  auto domain_check = [rho](Complex v, const char* what) {
    if (std::abs(v) > rho * (1.0 + 1e-9))
      throw DomainEscapeError(std::string("solve_curve: ") + what +
                              " left the chart domain");
  };

  CField z(N), p(N);
  for (int i = 0; i < N; ++i) {
    z[i] = data.Z.eval(grid.nodes[i]);
    domain_check(z[i], "z");
    p[i] = data.P.eval(grid.nodes[i]);
    domain_check(p[i], "p");
  }
  domain_check(data.w0, "w0");

  // Radial integration of w from the current p field. The holomorphic part
  // of the integral is exact through the antiderivative series; only the
  // correction is stepped.
  auto integrate_w = [&](const CField& pf) -> CField {
    CField w(N, Complex(0, 0));
    w[0] = data.w0;
    std::vector<double> radii(grid.n + 1);
    radii[0] = 0.0;
    for (int j = 1; j <= grid.n; ++j) radii[j] = grid.ring_radius(j);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < na; ++k) {
      const double phi = k * grid.dphi();
      const Complex dir(std::cos(phi), std::sin(phi));
      std::vector<Complex> D(grid.n + 1);
      D[0] = pf[0] - data.P.eval(Complex(0, 0));
      for (int j = 1; j <= grid.n; ++j)
        D[j] = pf[grid.index(j, k)] - data.P.eval(grid.nodes[grid.index(j, k)]);
      auto rhs = [&](double t, Complex C) {
        const Complex sigma = t * dir;
        const Complex zv = data.Z.eval(sigma);
        const Complex wv = data.w0 + whol.eval(sigma) + C;
        const Complex pv = data.P.eval(sigma) + ray_interp(radii, D, t);
        const Complex q = c.eval(zv, wv, pv);
        const Complex dz = Zp.eval(sigma) * dir;
        return ray_interp(radii, D, t) * dz + q * std::conj(dz);
      };
      Complex C(0, 0);
      double t = 0.0;
      for (int j = 1; j <= grid.n; ++j) {
        const double t1 = radii[j];
        const int steps = opt.substeps;
        const double h = (t1 - t) / steps;
        for (int s = 0; s < steps; ++s) {
          const Complex k1 = rhs(t, C);
          const Complex k2 = rhs(t + 0.5 * h, C + 0.5 * h * k1);
          const Complex k3 = rhs(t + 0.5 * h, C + 0.5 * h * k2);
          const Complex k4 = rhs(t + h, C + h * k3);
          C += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
          t += h;
        }
        w[grid.index(j, k)] = data.w0 + whol.eval(grid.nodes[grid.index(j, k)]) + C;
      }
    }
    return w;
  };

  // Tangency defect of the current field: z is holomorphic by construction,
  // so only the conj(Z') component of the contact equation remains.
  auto tangency_residual = [&](const CField& w, const CField& pf) {
    const CField wsb = grid.d_sigmabar(w);
    double worst = 0.0;
    for (int j = 1; j <= grid.n; ++j) {
      if (!grid.interior(j)) continue;
      for (int k = 0; k < na; ++k) {
        const int i = grid.index(j, k);
        const Complex q = c.eval(z[i], w[i], pf[i]);
        worst = std::max(worst,
                         std::abs(wsb[i] - q * std::conj(Zp.eval(grid.nodes[i]))));
      }
    }
    return worst;
  };

  // Central differences across the center node for both Wirtinger
  // derivatives there; the ring stencils do not cover it.
  auto center_derivatives = [&](const CField& f, Complex& ds, Complex& dsb) {
    const double r1 = grid.ring_radius(1);
    const Complex dx = (f[grid.index(1, 0)] - f[grid.index(1, na / 2)]) / (2 * r1);
    const Complex dy =
        (f[grid.index(1, na / 4)] - f[grid.index(1, 3 * na / 4)]) / (2 * r1);
    ds = 0.5 * (dx - Complex(0, 1) * dy);
    dsb = 0.5 * (dx + Complex(0, 1) * dy);
  };

  // Anti-holomorphic source for p: along the curve, differentiating the
  // contact relation in z gives
  //   p_zbar = Q_z + Q_w p + Q_wbar conj(q) + Q_p p_z + Q_pbar conj(p_zbar)
  // which converts to the sigma parameter through Z' and solves pointwise
  // for p_sigmabar.
  auto source_G = [&](const CField& w, const CField& pf) -> CField {
    CField psig = grid.d_sigma(pf);
    {
      Complex ds, dsb;
      center_derivatives(pf, ds, dsb);
      psig[0] = ds;
    }
    CField G(N, Complex(0, 0));
    for (int i = 0; i < N; ++i) {
      const Complex q = c.eval(z[i], w[i], pf[i]);
      const Complex qz = d.Qz.eval(z[i], w[i], pf[i]);
      const Complex qw = d.Qw.eval(z[i], w[i], pf[i]);
      const Complex qwb = d.Qwb.eval(z[i], w[i], pf[i]);
      const Complex qp = d.Qp.eval(z[i], w[i], pf[i]);
      const Complex qpb = d.Qpb.eval(z[i], w[i], pf[i]);
      const Complex zp = Zp.eval(grid.nodes[i]);
      Complex A = std::conj(zp) * (qz + qw * pf[i] + qwb * std::conj(q));
      Complex B(0, 0);
      if (std::abs(qp) > 0.0 || std::abs(qpb) > 0.0) {
        if (std::abs(zp) < 1e-12)
          throw DomainError(
              "solve_curve: critical point of Z with p-dependent structure");
        const Complex ratio = std::conj(zp) / zp;
        A += ratio * qp * psig[i];
        B = ratio * qpb;
      }
      const double b2 = std::norm(B);
      if (b2 > 0.9)
        throw DomainEscapeError("solve_curve: structure is too far from elliptic");
      G[i] = (A + B * std::conj(A)) / (1.0 - b2);
    }
    return G;
  };

  // Unknown density phi with p = P + T[phi]: the update moves phi by the
  // pointwise defect of the discrete equation p_sigmabar = G, so the fixed
  // point solves it to stencil accuracy while the holomorphic datum stays
  // pinned to P.
  // Outer loop. Phase one is the plain fixed-point update phi = G, which
  // contracts geometrically at small radius. Phase two switches to the
  // stencil-defect update with Anderson mixing, which drives the discrete
  // equation p_sigmabar = G to stencil accuracy; its updates bottom out at
  // the quadrature noise floor of the transform, so a stall below 1e-8 is
  // accepted as converged.
  SolveResult out;
  CField phi(N, Complex(0, 0));
  CField w = integrate_w(p);
  std::vector<Eigen::VectorXcd> hist_phi, hist_res;
  constexpr int kMix = 4;
  std::vector<double> recent;
  bool polish = false;
  int polish_start = 0;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    for (int i = 0; i < N; ++i) {
      domain_check(w[i], "w");
      domain_check(p[i], "p");
    }
    const CField G = source_G(w, p);
    if (!polish && (iter > 12 || (!out.history.empty() &&
                                  out.history.back().delta < 1e-7))) {
      polish = true;
      polish_start = iter;
    }
    Eigen::VectorXcd Phi(N), R(N);
    if (polish) {
      const CField pbar = grid.d_sigmabar(p);
      Phi[0] = G[0];
      for (int j = 1; j <= grid.n; ++j)
        for (int k = 0; k < na; ++k) {
          const int i = grid.index(j, k);
          Phi[i] = grid.interior(j) ? phi[i] + G[i] - pbar[i] : G[i];
        }
    } else {
      for (int i = 0; i < N; ++i) Phi[i] = G[i];
    }
    for (int i = 0; i < N; ++i) R[i] = Phi[i] - phi[i];
    Eigen::VectorXcd next = Phi;
    if (polish) {
      hist_phi.push_back(Phi);
      hist_res.push_back(R);
      if (static_cast<int>(hist_phi.size()) > kMix + 1) {
        hist_phi.erase(hist_phi.begin());
        hist_res.erase(hist_res.begin());
      }
      const int h = static_cast<int>(hist_res.size());
      if (h >= 2) {
        Eigen::MatrixXcd dR(N, h - 1), dP(N, h - 1);
        for (int col = 0; col < h - 1; ++col) {
          dR.col(col) = hist_res[col + 1] - hist_res[col];
          dP.col(col) = hist_phi[col + 1] - hist_phi[col];
        }
        Eigen::MatrixXcd A = dR.adjoint() * dR;
        A += 1e-12 * (A.trace() + Complex(1e-300, 0)) *
             Eigen::MatrixXcd::Identity(h - 1, h - 1);
        const Eigen::VectorXcd b = dR.adjoint() * R;
        const Eigen::VectorXcd gamma = A.ldlt().solve(b);
        if (gamma.allFinite()) next = Phi - dP * gamma;
      }
    }
    for (int i = 0; i < N; ++i) phi[i] = next[i];

    const CField T = cauchy_transform(grid, phi);
    CField pnew(N);
    double delta = 0.0;
    for (int i = 0; i < N; ++i) {
      pnew[i] = data.P.eval(grid.nodes[i]) + T[i];
      delta = std::max(delta, std::abs(pnew[i] - p[i]));
    }
    p = std::move(pnew);
    w = integrate_w(p);
    const double res = tangency_residual(w, p);
    out.history.push_back({iter, delta, res});
    out.iterations = iter;
    if (delta < opt.tolerance) {
      out.status = SolveStatus::Converged;
      break;
    }
    recent.push_back(delta);
    if (recent.size() > 8) recent.erase(recent.begin());
    const auto& hist = out.history;
    const bool delta_stalled =
        recent.size() == 8 && delta < 1e-8 && recent.front() < 1.5 * delta;
    const bool residual_stalled =
        polish && iter >= polish_start + 9 && delta < 1e-7 &&
        hist.size() >= 9 && hist[hist.size() - 9].residual < 1.25 * res;
    if (delta_stalled || residual_stalled) {
      out.status = SolveStatus::Converged;  // stalled at the noise floor
      break;
    }
  }
  out.residual = out.history.empty() ? 0.0 : out.history.back().residual;
  out.field.grid = grid;
  out.field.z = std::move(z);
  out.field.w = std::move(w);
  out.field.p = std::move(p);
  return out;
}

}  // namespace pseudocurve
