#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "pseudocurve/congruence.hpp"
#include "pseudocurve/diskgrid.hpp"

namespace pseudocurve {

// One monomial of Q: coeff * z^e0 zbar^e1 w^e2 wbar^e3 p^e4 pbar^e5.
struct ChartTerm {
  std::array<int, 6> exp{};
  Complex coeff;
};

// A local structure in adapted coordinates: the function
// Q(z, zbar, w, wbar, p, pbar) with Q = dQ = 0 at the origin, stored as a
// polynomial coefficient table, plus a domain radius per variable.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<ChartTerm> terms, double radius, int degree = 6,
        std::string builtin = "");

  static Chart flat();
  static Chart monomial(const std::array<int, 6>& exp, Complex coeff,
                        double radius = 1.0);

  Complex eval(Complex z, Complex w, Complex p) const;

  // Partial derivative table with respect to variable 0..5 in the order
  // (z, zbar, w, wbar, p, pbar).
  Chart partial(int var) const;

  // Upper bound for sum_k |dQ/dx_k| over the polydisk of the given radius.
  double gradient_bound(double r) const;

  bool empty() const { return terms_.empty(); }
  const std::vector<ChartTerm>& terms() const { return terms_; }
  double radius() const { return radius_; }
  int degree() const { return degree_; }
  const std::string& builtin() const { return builtin_; }

  // Q(0) = 0 and dQ(0) = 0: no constant and no linear terms.
  void validate() const;

 private:
  std::vector<ChartTerm> terms_;
  double radius_ = 1.0;
  int degree_ = 6;
  std::string builtin_;
};

// A sampled local curve: complex fields over a disk grid in the parameter.
struct CurveField {
  DiskGrid grid;
  CField z, w, p;
};

// Point linearization of a pair of first-order equations F^i(x, u, p^j_k):
// df1, df2 hold the derivatives with respect to the four slots p^j_k.
struct PdePairLinearization {
  Mat2 df1 = Mat2::Zero();  // (j, k) entry = dF^1 / dp^{j+1}_{k+1}
  Mat2 df2 = Mat2::Zero();
};

// Ellipticity of the pair: the characteristic binary quadratic
//   det(dF^i/dp^j_k xi_k) has no nonzero real roots.
// Throws RankDeficientError when the stacked 2x4 matrix has rank < 2.
bool pde_pair_elliptic(const PdePairLinearization& lin);

// Linearization of the realified graph equation of the chart at the fiber
// point with p-coordinate p0 over (z0, w0).
PdePairLinearization linearize_chart(const Chart& c, Complex z0, Complex w0,
                                     Complex p0 = Complex(0, 0));

// The oriented graph plane { dw = p dz + q dzbar } in the realification
// (x1, x2, x3, x4) = (Re z, Im z, Re w, Im w).
TwoPlane graph_plane(Complex p, Complex q);

struct FiberOptions {
  // Sample |p| <= p_radius only; non-positive means the full compactified
  // p-sphere through the stereographic grid.
  double p_radius = 0.0;
  int cells = 64;  // grid cells per axis
};

// The fiber of the chart over (z0, w0) as a line congruence in graph form.
// Multivaluedness over S2- is reported through graph_defect(), not thrown.
LineCongruence fiber_congruence(const Chart& c, Complex z0, Complex w0,
                                const FiberOptions& opt = {});

// Max-norm over interior grid nodes of w_zbar - Q(z, zbar, w, wbar, w_z,
// conj(w_z)) with 4th-order differences; requires the gauge z(sigma) = sigma.
double chart_residual(const Chart& c, const CurveField& field);

}  // namespace pseudocurve
