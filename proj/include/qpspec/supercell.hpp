#pragma once

#include <utility>
#include <vector>

#include "qpspec/contfrac.hpp"
#include "qpspec/numerics.hpp"
#include "qpspec/potentials.hpp"

namespace qpspec::supercell {

inline constexpr int kDefaultPointsPerUnit = 40;
inline constexpr int kDefaultAlphaCount = 64;

// One quasi-momentum eigenproblem on a period cell of length T = N h:
// -(u_{i-1} - 2 u_i + u_{i+1})/h^2 + V_i u_i = lambda (rho_i) u_i with the
// wrap-around condition u(T) = exp(i alpha T) u(0). An empty weight vector
// means rho = 1 (the standard problem).
struct BlochProblem {
  std::vector<double> potential;
  std::vector<double> weight;
  double alpha = 0.0;
  double h = 0.0;
};

struct BandDiagram {
  std::vector<double> alphas;
  // bands[j][b] is the b-th lowest eigenvalue at alphas[j].
  std::vector<std::vector<double>> bands;
  double period = 0.0;
  double h = 0.0;
  int level = 0;
};

struct Gap {
  double lo = 0.0;
  double hi = 0.0;
};

struct GapSet {
  std::vector<Gap> gaps;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct ConvergencePair {
  long long q = 0;
  double hausdorff = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePair> pairs;
  // Least-squares constant for d_H ~ C / q.
  double fitted_c = 0.0;
  // Regression slope of log d_H against log q.
  double loglog_slope = 0.0;
};

// Cyclic second-difference matrix with Bloch phases on the corner entries.
// alpha is reduced modulo 2 pi / T, and phases within 1e-14 of the real axis
// are snapped onto it so alpha in {0, pi/T} takes the real solver path.
numerics::HermitianMatrix assemble_bloch(const BlochProblem& problem);

// All N eigenvalues of the (possibly weighted) Bloch problem, ascending.
std::vector<double> bloch_eigenvalues(const BlochProblem& problem, bool parallel = true);

// Band diagram of the periodic approximant F(x, (p/q) x) over one cell of
// length q. The alpha grid is the half-open uniform grid alpha_j =
// j (2 pi / T) / alpha_count, which contains both band-edge momenta 0 and
// pi/T whenever alpha_count is even. Spectra at alpha and 2 pi / T - alpha
// coincide (real coefficients), so only half the grid is solved.
// With generalized set, the field samples act as the weight rho = F and the
// potential is zero; otherwise they act as the potential V = F.
BandDiagram band_diagram(const potentials::CoefficientField& field,
                         const contfrac::RationalApproximant& approx, int alpha_count,
                         int n_bands, int points_per_unit, bool generalized,
                         bool parallel = true);

// Leading-order eigenvalue error of the second-difference scheme at
// eigenvalue scale lambda: lambda^2 h^2 / 12.
double discretization_error_estimate(double lambda_scale, double h);

// Open intervals of the window not covered by any band range
// [min_alpha lambda_b, max_alpha lambda_b]. Band extrema get a three-point
// parabolic refinement when the alpha grid has at least 4 samples. Regions
// of the window beyond the outermost band samples are not reported as gaps.
// merge_tol < 0 selects the default 5 * discretization_error_estimate at the
// window scale; gaps no wider than merge_tol are dropped.
GapSet extract_gaps(const BandDiagram& bd, double window_lo, double window_hi,
                    double merge_tol = -1.0);

// Intersection of several gap families over the intersection of their
// windows: intervals certified by every member.
GapSet intersect_gaps(const std::vector<GapSet>& sets);

// Windowed Hausdorff distances between consecutive approximant spectra,
// with the fitted constant of the C/q decay law and the log-log slope.
ConvergenceStudy convergence_study(const potentials::CoefficientField& field,
                                   const std::vector<contfrac::RationalApproximant>& levels,
                                   double window_lo, double window_hi, int alpha_count,
                                   int points_per_unit, bool generalized,
                                   bool parallel = true);

}  // namespace qpspec::supercell
