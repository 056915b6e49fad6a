#pragma once

#include <complex>
#include <vector>

#include "pseudocurve/chart.hpp"
#include "pseudocurve/diskgrid.hpp"

namespace pseudocurve {

// Truncated power series in the curve parameter.
struct PowerSeries {
  std::vector<Complex> c;  // c[k] multiplies sigma^k

  static PowerSeries identity() { return {{Complex(0, 0), Complex(1, 0)}}; }
  static PowerSeries constant(Complex v) { return {{v}}; }

  Complex eval(Complex s) const;
  PowerSeries derivative() const;
  PowerSeries antiderivative() const;  // vanishing at 0
  PowerSeries product(const PowerSeries& other) const;
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

// Holomorphic input data for a local curve: series for the two holomorphic
// coordinates of the construction plus the integration constant for w.
struct HolomorphicData {
  PowerSeries Z = PowerSeries::identity();
  PowerSeries P = PowerSeries::constant(Complex(0, 0));
  Complex w0 = Complex(0, 0);

  // Coefficient decay check: |c_k| r^k must stay bounded on the grid radius.
  void validate(double radius) const;
};

struct SolveOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;  // max-norm distance between successive iterates
  int substeps = 4;          // path-integration substeps per ring gap
};

struct SolveHistoryRow {
  int iteration = 0;
  double delta = 0.0;
  double residual = 0.0;
};

enum class SolveStatus { Converged, NoConvergence };

struct SolveResult {
  CurveField field;
  std::vector<SolveHistoryRow> history;
  SolveStatus status = SolveStatus::NoConvergence;
  double residual = 0.0;  // tangency defect max |w_sbar - q conj(Z')|
  int iterations = 0;
};

// Local curve construction: z is pinned to the holomorphic datum Z, w is
// integrated radially from w0 along each grid ray, and the anti-holomorphic
// part of p is recovered by a fixed-point loop through the solid Cauchy
// transform. Throws DomainEscapeError when an iterate leaves the chart
// domain; non-convergence is reported through the returned status.
SolveResult solve_curve(const Chart& c, const HolomorphicData& data,
                        const DiskGrid& grid, const SolveOptions& opt = {});

}  // namespace pseudocurve
