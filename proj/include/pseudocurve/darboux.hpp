#pragma once

#include <string>
#include <vector>

#include "pseudocurve/chart.hpp"
#include "pseudocurve/solver.hpp"
#include "pseudocurve/sym.hpp"

namespace pseudocurve {

// The two integrable builtin structures with polynomial tables: "flat" has
// Q identically zero and "darboux2" has Q = w wbar.
Chart builtin_chart(const std::string& name);

struct Case3Options {
  int substeps = 8;  // integration substeps per ring gap
};

struct Case3Curve {
  CurveField field;   // z carries Z, w carries W, p carries P(Z)
  double residual;    // max interior |W_Zbar - conj(W)/(1 - |Z|^2)|
};

// Integrates the hyperbolic-disk structure along radial paths from Z = 0
// with W(0) = w0, for a holomorphic momentum series P(Z).
Case3Curve case3_integrate(const PowerSeries& pfun, Complex w0,
                           const DiskGrid& zgrid, const Case3Options& opt = {});

// Residual of the defining equation for a (Z, W) field on its grid.
double case3_residual(const CurveField& field);

// The additive shear symmetry generated by a holomorphic f(Z):
//   r = Z^2 f + conj(d/dZ (Z^2 f)),  a = (conj(r) + r conj(Z)) / (1 - |Z|^2),
//   W -> W + a, with the holomorphic momentum shifted accordingly.
CurveField case3_symmetry(const PowerSeries& fholo, const CurveField& field);

// A triple of complex 1-forms over the chart coordinates.
struct Coframe {
  sym::Form1 theta, omega, pi;
};

// Sample point in the chart coordinates.
struct ChartPoint {
  Complex z, w, p;
};

// Coframe of the dual-family structure built from a solution F of its
// constraint equation; verifies the constraint and nondegeneracy at the
// sample points (default: a deterministic interior sample set).
Coframe case4_coframe(const sym::Expr& F,
                      const std::vector<ChartPoint>& samples = {});

// Constraint residual of F at one point.
Complex case4_constraint(const sym::Expr& F, const ChartPoint& at);

// Deterministic sample cloud in the polydisk used by the verification and
// fitting routines.
std::vector<ChartPoint> default_chart_samples(int count, unsigned seed = 2024);

// Max distance, over the samples, between the span of the coordinate-dual
// structure's forms pulled back through (W, Z, P) = (w, p, -z) and the span
// of the swapped coframe (theta, pi, -omega) of case4_coframe(F).
double duality_check(const sym::Expr& F,
                     const std::vector<ChartPoint>& samples = {});

struct StructureFitSample {
  ChartPoint at;
  Complex S1, S2, T2, T3, U2, U3, V2, V3;
  // Connection coefficients (alpha, beta, gamma, delta, epsilon) in the
  // coframe basis, 6 each, for inspection.
  Eigen::Matrix<Complex, 6, 5> connection;
  double residual = 0.0;
};

struct StructureFit {
  std::vector<StructureFitSample> samples;
  double max_residual = 0.0;
};

// Least-squares fit of the structure-equation shapes at the samples: solves
// for the connection coefficients and the torsions (S, T, U, V) and reports
// the misfit. Zero residual certifies a valid coframe.
StructureFit structure_fit(const Coframe& cf,
                           const std::vector<ChartPoint>& samples);

// Flat coframe (dw - p dz, dz, dp).
Coframe flat_coframe();

}  // namespace pseudocurve
