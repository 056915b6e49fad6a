#include "pseudocurve/diskgrid.hpp"

#include <algorithm>
#include <cmath>

namespace pseudocurve {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DiskGrid DiskGrid::polar(double radius, int n) {
  if (n < 8) throw GridTooCoarseError("DiskGrid: need at least 8 rings");
  DiskGrid g;
  g.radius = radius;
  g.n = n;
  g.nodes.resize(g.size());
  g.nodes[0] = Complex(0, 0);
  const double dphi = g.dphi();
  for (int j = 1; j <= n; ++j) {
    const double r = g.ring_radius(j);
    for (int k = 0; k < g.angles(); ++k) {
      const double phi = k * dphi;
      g.nodes[g.index(j, k)] = Complex(r * std::cos(phi), r * std::sin(phi));
    }
  }
  return g;
}

double DiskGrid::dphi() const { return 2.0 * kPi / angles(); }

Complex DiskGrid::at(const CField& f, int j, int k) const {
  const int na = angles();
  k = ((k % na) + na) % na;
  if (j == 0) return f[0];
  if (j < 0) return at(f, -j, k + na / 2);
  return f[index(j, k)];
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
  // Fornberg 1988. d[node][order]; the new-node column is formed before the
  // trailing column is updated in place.
  const int nn = static_cast<int>(xs.size());
  std::vector<std::vector<double>> d(nn, std::vector<double>(m + 1, 0.0));
  d[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  for (int i = 1; i < nn; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          d[i][k] = c1 * (k * d[i - 1][k - 1] - c5 * d[i - 1][k]) / c2;
        d[i][0] = -c1 * c5 * d[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) d[j][k] = (c4 * d[j][k] - k * d[j][k - 1]) / c3;
      d[j][0] = c4 * d[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nn);
  for (int i = 0; i < nn; ++i) w[i] = d[i][m];
  return w;
}

namespace {

bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

// In-place iterative radix-2 transform; sign = -1 forward, +1 inverse
// (inverse is unscaled).
void fft_pow2(std::vector<Complex>& a, int sign) {
  const int m = static_cast<int>(a.size());
  for (int i = 1, j = 0; i < m; ++i) {
    int bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= m; len <<= 1) {
    const double ang = sign * 2.0 * kPi / len;
    const Complex wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < m; i += len) {
      Complex w(1, 0);
      for (int t = 0; t < len / 2; ++t) {
        const Complex u = a[i + t];
        const Complex v = a[i + t + len / 2] * w;
        a[i + t] = u + v;
        a[i + t + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<Complex> dft(const std::vector<Complex>& a, int sign) {
  if (is_pow2(static_cast<int>(a.size()))) {
    std::vector<Complex> out = a;
    fft_pow2(out, sign);
    return out;
  }
  const int m = static_cast<int>(a.size());
  std::vector<Complex> out(m, Complex(0, 0));
  for (int k = 0; k < m; ++k) {
    Complex acc(0, 0);
    for (int t = 0; t < m; ++t) {
      const double ang = sign * 2.0 * kPi * k * t / m;
      acc += a[t] * Complex(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Spectral derivative of samples over one period.
std::vector<Complex> spectral_dphi(const std::vector<Complex>& a) {
  const int m = static_cast<int>(a.size());
  std::vector<Complex> hat = dft(a, -1);
  for (int k = 0; k < m; ++k) {
    int mode = k <= m / 2 ? k : k - m;
    if (2 * k == m) mode = 0;  // drop the unmatched Nyquist mode
    hat[k] *= Complex(0, mode);
  }
  std::vector<Complex> out = dft(hat, +1);
  for (auto& v : out) v /= static_cast<double>(m);
  return out;
}

// d/dr by 4th-order stencils on the true signed radii (rays continue
// through the center); d/dphi spectrally ring by ring.
void polar_derivatives(const DiskGrid& g, const CField& f, CField& fr,
                       CField& fphi) {
  const int n = g.n, na = g.angles();
  fr.assign(g.size(), Complex(0, 0));
  fphi.assign(g.size(), Complex(0, 0));
  const double dr = g.dr();

  auto signed_radius = [dr](int j) {
    if (j == 0) return 0.0;
    const double r = (std::abs(j) - 0.5) * dr;
    return j > 0 ? r : -r;
  };
  for (int j = 1; j <= n; ++j) {
    std::vector<int> offs(5);
    for (int t = 0; t < 5; ++t)
      offs[t] = (j <= n - 2 ? j - 2 + t : n - 4 + t) - j;
    std::vector<double> xs(5);
    for (int t = 0; t < 5; ++t) xs[t] = signed_radius(j + offs[t]);
    const std::vector<double> w = fd_weights(signed_radius(j), xs, 1);
    for (int k = 0; k < na; ++k) {
      Complex dfr(0, 0);
      for (int t = 0; t < 5; ++t) dfr += w[t] * g.at(f, j + offs[t], k);
      fr[g.index(j, k)] = dfr;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 1; j <= n; ++j) {
    std::vector<Complex> ring(na);
    for (int k = 0; k < na; ++k) ring[k] = f[g.index(j, k)];
    const std::vector<Complex> d = spectral_dphi(ring);
    for (int k = 0; k < na; ++k) fphi[g.index(j, k)] = d[k];
  }
}

}  // namespace

CField DiskGrid::d_sigma(const CField& f) const {
  CField fr, fphi, out(size(), Complex(0, 0));
  polar_derivatives(*this, f, fr, fphi);
  for (int j = 1; j <= n; ++j) {
    const double r = ring_radius(j);
    for (int k = 0; k < angles(); ++k) {
      const double phi = k * dphi();
      const Complex e = std::exp(Complex(0, -phi));
      const int i = index(j, k);
      out[i] = 0.5 * e * (fr[i] - Complex(0, 1) / r * fphi[i]);
    }
  }
  return out;
}

CField DiskGrid::d_sigmabar(const CField& f) const {
  CField fr, fphi, out(size(), Complex(0, 0));
  polar_derivatives(*this, f, fr, fphi);
  for (int j = 1; j <= n; ++j) {
    const double r = ring_radius(j);
    for (int k = 0; k < angles(); ++k) {
      const double phi = k * dphi();
      const Complex e = std::exp(Complex(0, phi));
      const int i = index(j, k);
      out[i] = 0.5 * e * (fr[i] + Complex(0, 1) / r * fphi[i]);
    }
  }
  return out;
}

namespace {

// Quadrature data of one sector cell: area, centroid, and the complex
// moments Int (zeta - c)^k dA for k = 2, 3. The kernel 1/(sigma - zeta) is
// holomorphic in zeta, so these give a two-term Taylor correction:
//   Int dA/(sigma - zeta) = A/(sigma-c) + M2/(sigma-c)^3 + M3/(sigma-c)^4 + ...
struct CellQuad {
  Complex centroid;
  double area = 0.0;
  Complex m2, m3;
};

CellQuad sector_quad(double r0, double r1, double phi0, double phi1) {
  auto raw = [&](int k) -> Complex {  // Int zeta^k dA, k >= 1
    const double rad = (std::pow(r1, k + 2) - std::pow(r0, k + 2)) / (k + 2);
    const Complex e1(std::cos(k * phi1), std::sin(k * phi1));
    const Complex e0(std::cos(k * phi0), std::sin(k * phi0));
    return rad * (e1 - e0) / Complex(0, static_cast<double>(k));
  };
  CellQuad q;
  q.area = 0.5 * (r1 * r1 - r0 * r0) * (phi1 - phi0);
  const Complex s1 = raw(1), s2 = raw(2), s3 = raw(3);
  const Complex c = s1 / q.area;
  q.centroid = c;
  q.m2 = s2 - c * c * q.area;
  q.m3 = s3 - 3.0 * c * s2 + 2.0 * c * c * c * q.area;
  return q;
}

Complex corrected_kernel(const CellQuad& q, const Complex& sigma) {
  const Complex d = sigma - q.centroid;
  const Complex inv = Complex(1, 0) / d;
  const Complex inv3 = inv * inv * inv;
  return q.area * inv + q.m2 * inv3 + q.m3 * inv3 * inv;
}

// One cell of the polar grid.
struct Cell {
  Complex center;  // node position
  CellQuad quad;
  double r0, r1, phi0, phi1;  // extent; r0 < 0 flags the center disk cell
};

std::vector<Cell> grid_cells(const DiskGrid& g) {
  std::vector<Cell> cells(g.size());
  const double dr = g.dr(), dphi = g.dphi();
  // Center disk: centroid 0 and vanishing complex moments by symmetry.
  cells[0] = {Complex(0, 0),
              {Complex(0, 0), kPi * 0.25 * dr * dr, Complex(0, 0), Complex(0, 0)},
              -1.0,
              0.5 * dr,
              0.0,
              2.0 * kPi};
  for (int j = 1; j <= g.n; ++j) {
    const double r = g.ring_radius(j);
    for (int k = 0; k < g.angles(); ++k) {
      const double phi = k * dphi;
      const double r0 = r - 0.5 * dr, r1 = r + 0.5 * dr;
      const double p0 = phi - 0.5 * dphi, p1 = phi + 0.5 * dphi;
      cells[g.index(j, k)] = {g.nodes[g.index(j, k)], sector_quad(r0, r1, p0, p1),
                              r0, r1, p0, p1};
    }
  }
  return cells;
}

// Subdivided evaluation of Int dA / (sigma - zeta) over a near cell; the
// sub-cells straddling sigma pair off by symmetry.
Complex near_cell_integral(const Cell& c, const Complex& sigma, int S) {
  Complex acc(0, 0);
  const bool disk = c.r0 < 0.0;
  const double rlo = disk ? 0.0 : c.r0;
  const double rhi = c.r1;
  const double plo = disk ? 0.0 : c.phi0;
  const double phi_span = disk ? 2.0 * kPi : c.phi1 - c.phi0;
  const int Sb = disk ? 4 * S : S;
  const double dr = (rhi - rlo) / S;
  const double dphi = phi_span / Sb;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < Sb; ++b) {
      const double r0 = rlo + a * dr, r1 = r0 + dr;
      const double p0 = plo + b * dphi, p1 = p0 + dphi;
      const CellQuad q = sector_quad(r0, r1, p0, p1);
      const double d = std::abs(sigma - q.centroid);
      const double scale = std::max(r1 - r0, std::abs(q.centroid) * dphi);
      if (d < 1e-14) continue;  // the singular sub-cell pairs off by symmetry
      if (d > 2.0 * scale)
        acc += corrected_kernel(q, sigma);
      else
        acc += q.area / (sigma - q.centroid);
    }
  }
  return acc;
}

CField transform_impl(const DiskGrid& grid, const CField& g,
                      const std::vector<Complex>& targets) {
  const auto cells = grid_cells(grid);
  const double dr = grid.dr();
  CField out(targets.size(), Complex(0, 0));
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(targets.size()); ++t) {
    const Complex sigma = targets[t];
    Complex acc(0, 0);
    for (size_t i = 0; i < cells.size(); ++i) {
      const Cell& c = cells[i];
      if (std::abs(g[i]) == 0.0) continue;
      const double cell_scale =
          c.r0 < 0.0 ? c.r1
                     : std::max(c.r1 - c.r0,
                                std::abs(c.center) * (c.phi1 - c.phi0));
      const double dist = std::abs(sigma - c.center);
      if (dist > 3.5 * std::max(cell_scale, dr)) {
        acc += g[i] * corrected_kernel(c.quad, sigma);
      } else {
        const int S = dist < 1.5 * cell_scale ? 16 : 8;
        acc += g[i] * near_cell_integral(c, sigma, S);
      }
    }
    out[t] = acc / kPi;
  }
  return out;
}

}  // namespace

CField cauchy_transform(const DiskGrid& grid, const CField& g) {
  if (static_cast<int>(g.size()) != grid.size())
    throw GridTooCoarseError("cauchy_transform: field size mismatch");
  return transform_impl(grid, g, grid.nodes);
}

CField cauchy_transform_at(const DiskGrid& grid, const CField& g,
                           const std::vector<Complex>& targets) {
  if (static_cast<int>(g.size()) != grid.size())
    throw GridTooCoarseError("cauchy_transform: field size mismatch");
  return transform_impl(grid, g, targets);
}

CField boundary_cauchy(const CField& boundary, double R,
                       const std::vector<Complex>& targets) {
  const int M = static_cast<int>(boundary.size());
  if (M < 64)
    throw GridTooCoarseError("boundary_cauchy: need at least 64 boundary nodes");
  std::vector<Complex> zeta(M);
  for (int k = 0; k < M; ++k) {
    const double phi = 2.0 * kPi * k / M;
    zeta[k] = R * Complex(std::cos(phi), std::sin(phi));
  }
  CField out(targets.size(), Complex(0, 0));
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(targets.size()); ++t) {
    Complex acc(0, 0);
    for (int k = 0; k < M; ++k) acc += boundary[k] * zeta[k] / (zeta[k] - targets[t]);
    out[t] = acc / static_cast<double>(M);
  }
  return out;
}

}  // namespace pseudocurve
