#pragma once

#include <complex>
#include <vector>

#include "pseudocurve/errors.hpp"

namespace pseudocurve {

using Complex = std::complex<double>;
using CField = std::vector<Complex>;

// Polar grid on a disk: a center node plus n rings of 2n angles. Ring j
// (1-based) sits at radius (j - 1/2) * radius / n, so the ring cells tile
// the disk exactly.
struct DiskGrid {
  double radius = 1.0;
  int n = 32;  // rings; angles() = 2 n

  static DiskGrid polar(double radius, int n);

  int rings() const { return n; }
  int angles() const { return 2 * n; }
  int size() const { return 1 + n * angles(); }
  double dr() const { return radius / n; }
  double dphi() const;

  // Node 0 is the center; node index(j, k) = 1 + (j-1)*angles() + k.
  int index(int j, int k) const { return 1 + (j - 1) * angles() + k; }
  double ring_radius(int j) const { return (j - 0.5) * dr(); }
  Complex node(int i) const { return nodes[i]; }

  std::vector<Complex> nodes;  // filled by polar()

  // Value at (j, k) with the ray continued through the center: j = 0 is the
  // center node and negative j reads the antipodal ray.
  Complex at(const CField& f, int j, int k) const;

  // Fourth-order derivatives with respect to sigma and conj(sigma) at the
  // nodes. Valid on rings 1..n-2 (outer two rings are filled with one-sided
  // radial stencils of the same order).
  CField d_sigma(const CField& f) const;
  CField d_sigmabar(const CField& f) const;

  // True when the 4th-order centered radial stencil fits: 1 <= j <= n - 2.
  bool interior(int j) const { return j >= 1 && j <= n - 2; }
};

// Finite-difference weights for the m-th derivative at x0 from the sample
// locations xs (Fornberg's recursion).
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m);

// Discrete solid Cauchy transform on the grid cells:
//   T[g](sigma) = (1/pi) Int g(zeta) dA / (sigma - zeta)
// with near-singular cells subdivided and the self cell handled by symmetry.
// Defined so that d/d(conj sigma) T[g] = g at interior nodes.
CField cauchy_transform(const DiskGrid& grid, const CField& g);

// Same transform evaluated at arbitrary targets.
CField cauchy_transform_at(const DiskGrid& grid, const CField& g,
                           const std::vector<Complex>& targets);

// Boundary Cauchy integral: values of (1/2 pi i) Int_{|zeta| = R} f dzeta /
// (zeta - sigma) at the targets, from samples of f at `boundary.size()`
// uniformly spaced nodes zeta_k = R exp(2 pi i k / M).
CField boundary_cauchy(const CField& boundary, double R,
                       const std::vector<Complex>& targets);

}  // namespace pseudocurve
