#include "qpspec/supercell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpspec/error.hpp"

namespace qpspec::supercell {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_problem(const BlochProblem& problem) {
  if (problem.potential.size() < 8)
    fail(ErrorCode::GridTooCoarse, "need at least 8 grid points per cell");
  if (!(problem.h > 0.0)) fail(ErrorCode::InvalidArgument, "grid spacing must be positive");
  if (!problem.weight.empty()) {
    if (problem.weight.size() != problem.potential.size())
      fail(ErrorCode::InvalidArgument, "weight and potential grids differ in size");
    for (double w : problem.weight)
      if (!(w > 0.0)) fail(ErrorCode::NonPositiveWeight, "weight samples must be positive");
  }
}

// Minimum of the parabola through three cyclic neighbors of the extremal
// sample; falls back to the sample when the stencil is degenerate or the
// vertex lands outside it.
double refine_extremum_min(const std::vector<double>& y, std::size_t j) {
  const std::size_t n = y.size();
  const double ym = y[(j + n - 1) % n];
  const double y0 = y[j];
  const double yp = y[(j + 1) % n];
  const double denom = ym - 2.0 * y0 + yp;
  const double scale = std::fabs(ym) + std::fabs(y0) + std::fabs(yp) + 1.0;
  if (denom <= 1e-13 * scale) return y0;
  const double delta = 0.5 * (ym - yp) / denom;
  if (std::fabs(delta) > 1.0) return y0;
  return y0 - 0.125 * (ym - yp) * (ym - yp) / denom;
}

struct BandRange {
  double lo = 0.0;
  double hi = 0.0;
};

std::vector<BandRange> band_ranges(const BandDiagram& bd) {
  const std::size_t n_alpha = bd.bands.size();
  const std::size_t n_bands = bd.bands.front().size();
  const bool refine = n_alpha >= 4;
  std::vector<BandRange> ranges(n_bands);
  std::vector<double> column(n_alpha);
  for (std::size_t b = 0; b < n_bands; ++b) {
    std::size_t j_min = 0, j_max = 0;
    for (std::size_t j = 0; j < n_alpha; ++j) {
      column[j] = bd.bands[j][b];
      if (column[j] < column[j_min]) j_min = j;
      if (column[j] > column[j_max]) j_max = j;
    }
    ranges[b].lo = column[j_min];
    ranges[b].hi = column[j_max];
    if (refine) {
      ranges[b].lo = refine_extremum_min(column, j_min);
      for (double& v : column) v = -v;
      ranges[b].hi = -refine_extremum_min(column, j_max);
      for (double& v : column) v = -v;
    }
  }
  return ranges;
}

}  // namespace

numerics::HermitianMatrix assemble_bloch(const BlochProblem& problem) {
  validate_problem(problem);
  const std::size_t n = problem.potential.size();
  const double h = problem.h;
  const double period = h * static_cast<double>(n);
  const double inv_h2 = 1.0 / (h * h);

  const double alpha_period = kTwoPi / period;
  double alpha = std::fmod(problem.alpha, alpha_period);
  if (alpha < 0.0) alpha += alpha_period;

  double phase = alpha * period;
  double c = std::cos(phase);
  double s = std::sin(phase);
  // Snap nearly-real phases so alpha in {0, pi/T} assembles a real matrix.
  if (std::fabs(s) <= 1e-14) {
    s = 0.0;
    c = c >= 0.0 ? 1.0 : -1.0;
  }

  numerics::HermitianMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = numerics::Complex(2.0 * inv_h2 + problem.potential[i], 0.0);
    if (i + 1 < n) {
      a(i, i + 1) = numerics::Complex(-inv_h2, 0.0);
      a(i + 1, i) = numerics::Complex(-inv_h2, 0.0);
    }
  }
  a(0, n - 1) = numerics::Complex(-c * inv_h2, s * inv_h2);
  a(n - 1, 0) = numerics::Complex(-c * inv_h2, -s * inv_h2);
  return a;
}

std::vector<double> bloch_eigenvalues(const BlochProblem& problem, bool parallel) {
  const auto a = assemble_bloch(problem);
  if (problem.weight.empty()) return numerics::hermitian_eigenvalues(a, parallel).eigenvalues;
  return numerics::generalized_hermitian_eigenvalues(a, problem.weight, parallel).eigenvalues;
}

BandDiagram band_diagram(const potentials::CoefficientField& field,
                         const contfrac::RationalApproximant& approx, int alpha_count,
                         int n_bands, int points_per_unit, bool generalized, bool parallel) {
  if (alpha_count < 2) fail(ErrorCode::InvalidArgument, "need at least 2 alpha samples");
  if (n_bands < 1) fail(ErrorCode::InvalidArgument, "need at least 1 band");
  if (points_per_unit < 1) fail(ErrorCode::InvalidArgument, "points_per_unit must be positive");
  if (approx.q <= 0) fail(ErrorCode::InvalidArgument, "approximant denominator must be positive");

  const double period = static_cast<double>(approx.q);
  const std::size_t n = static_cast<std::size_t>(points_per_unit) *
                        static_cast<std::size_t>(approx.q);
  const double h = period / static_cast<double>(n);

  const auto coeff = potentials::periodic_approximant(field, approx);
  BlochProblem problem;
  problem.h = h;
  problem.potential.assign(n, 0.0);
  if (generalized) {
    problem.weight.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      problem.weight[i] = coeff(static_cast<double>(i) * h);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      problem.potential[i] = coeff(static_cast<double>(i) * h);
  }

  const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(n_bands), n);
  BandDiagram bd;
  bd.period = period;
  bd.h = h;
  bd.level = approx.index;
  bd.alphas.resize(static_cast<std::size_t>(alpha_count));
  bd.bands.assign(static_cast<std::size_t>(alpha_count), {});
  const double d_alpha = (kTwoPi / period) / static_cast<double>(alpha_count);
  for (int j = 0; j < alpha_count; ++j)
    bd.alphas[static_cast<std::size_t>(j)] = static_cast<double>(j) * d_alpha;

  // Spectra at alpha and 2 pi / T - alpha coincide for real coefficients, so
  // the upper half of the grid is a mirror copy.
  const int half = alpha_count / 2;
  for (int j = 0; j <= half; ++j) {
    problem.alpha = bd.alphas[static_cast<std::size_t>(j)];
    auto eigs = bloch_eigenvalues(problem, parallel);
    eigs.resize(kept);
    bd.bands[static_cast<std::size_t>(j)] = std::move(eigs);
  }
  for (int j = half + 1; j < alpha_count; ++j)
    bd.bands[static_cast<std::size_t>(j)] = bd.bands[static_cast<std::size_t>(alpha_count - j)];
  return bd;
}

double discretization_error_estimate(double lambda_scale, double h) {
  return lambda_scale * lambda_scale * h * h / 12.0;
}

GapSet extract_gaps(const BandDiagram& bd, double window_lo, double window_hi,
                    double merge_tol) {
  if (!(window_lo < window_hi)) fail(ErrorCode::InvalidArgument, "window is empty");
  if (bd.bands.empty() || bd.bands.front().empty())
    fail(ErrorCode::InvalidArgument, "band diagram has no samples");
  if (merge_tol < 0.0) {
    const double scale = std::max(std::fabs(window_lo), std::fabs(window_hi));
    merge_tol = 5.0 * discretization_error_estimate(scale, bd.h);
  }

  auto ranges = band_ranges(bd);
  std::sort(ranges.begin(), ranges.end(),
            [](const BandRange& a, const BandRange& b) { return a.lo < b.lo; });

  // Gaps only exist between bands; the window is clipped to the sampled
  // coverage so the half-infinite regions beyond it are not reported.
  double coverage_lo = ranges.front().lo;
  double coverage_hi = ranges.front().hi;
  for (const auto& r : ranges) coverage_hi = std::max(coverage_hi, r.hi);

  GapSet out;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  const double lo = std::max(window_lo, coverage_lo);
  const double hi = std::min(window_hi, coverage_hi);
  if (!(lo < hi)) return out;

  double covered_until = ranges.front().lo;
  for (const auto& r : ranges) {
    if (r.lo > covered_until) {
      const double gap_lo = std::max(covered_until, lo);
      const double gap_hi = std::min(r.lo, hi);
      if (gap_hi - gap_lo > merge_tol && gap_lo < hi && gap_hi > lo)
        out.gaps.push_back(Gap{gap_lo, gap_hi});
    }
    covered_until = std::max(covered_until, r.hi);
  }
  return out;
}

GapSet intersect_gaps(const std::vector<GapSet>& sets) {
  if (sets.empty()) fail(ErrorCode::InvalidArgument, "no gap sets to intersect");
  GapSet out = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    const GapSet& other = sets[k];
    GapSet merged;
    merged.window_lo = std::max(out.window_lo, other.window_lo);
    merged.window_hi = std::min(out.window_hi, other.window_hi);
    for (const auto& a : out.gaps)
      for (const auto& b : other.gaps) {
        const double lo = std::max({a.lo, b.lo, merged.window_lo});
        const double hi = std::min({a.hi, b.hi, merged.window_hi});
        if (lo < hi) merged.gaps.push_back(Gap{lo, hi});
      }
    std::sort(merged.gaps.begin(), merged.gaps.end(),
              [](const Gap& x, const Gap& y) { return x.lo < y.lo; });
    out = std::move(merged);
  }
  return out;
}

ConvergenceStudy convergence_study(const potentials::CoefficientField& field,
                                   const std::vector<contfrac::RationalApproximant>& levels,
                                   double window_lo, double window_hi, int alpha_count,
                                   int points_per_unit, bool generalized, bool parallel) {
  if (levels.size() < 3) fail(ErrorCode::InvalidArgument, "need at least 3 approximant levels");
  if (!(window_lo < window_hi)) fail(ErrorCode::InvalidArgument, "window is empty");

  std::vector<std::vector<double>> spectra;
  spectra.reserve(levels.size());
  for (const auto& level : levels) {
    const auto bd = band_diagram(field, level, alpha_count,
                                 std::numeric_limits<int>::max(), points_per_unit, generalized,
                                 parallel);
    std::vector<double> flat;
    flat.reserve(bd.bands.size() * bd.bands.front().size());
    for (const auto& row : bd.bands) flat.insert(flat.end(), row.begin(), row.end());
    std::sort(flat.begin(), flat.end());
    spectra.push_back(std::move(flat));
  }

  ConvergenceStudy study;
  double c_num = 0.0, c_den = 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(levels.size() - 1);
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    const double d = numerics::hausdorff_distance(spectra[l], spectra[l + 1], window_lo,
                                                  window_hi);
    const double q = static_cast<double>(levels[l].q);
    study.pairs.push_back(ConvergencePair{levels[l].q, d});
    c_num += d / q;
    c_den += 1.0 / (q * q);
    const double lx = std::log(q);
    const double ly = std::log(std::max(d, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  study.fitted_c = c_den > 0.0 ? c_num / c_den : 0.0;
  const double var = sxx - sx * sx / m;
  study.loglog_slope = var > 1e-30 ? (sxy - sx * sy / m) / var : 0.0;
  return study;
}

}  // namespace qpspec::supercell
