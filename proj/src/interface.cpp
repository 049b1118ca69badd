#include "qpspec/interface.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qpspec/error.hpp"
#include "qpspec/numerics.hpp"

namespace qpspec::interface {

namespace {

struct Grid {
  double half_width = 0.0;  // snapped to a whole number of steps
  std::size_t steps_per_side = 0;
  std::vector<double> x;  // -L .. L inclusive
};

Grid make_grid(const InterfaceProblem& p) {
  if (!(p.h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "interface grid spacing must be positive");
  }
  if (!(p.half_width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "interface half-width must be positive");
  }
  Grid g;
  g.steps_per_side = static_cast<std::size_t>(std::llround(p.half_width / p.h));
  if (2 * g.steps_per_side + 1 < 16) {
    throw Error(ErrorCode::GridTooCoarse,
                "interface grid has fewer than 16 nodes; shrink h or widen the domain");
  }
  g.half_width = static_cast<double>(g.steps_per_side) * p.h;
  const std::size_t count = 2 * g.steps_per_side + 1;
  g.x.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    g.x[i] = -g.half_width + static_cast<double>(i) * p.h;
  }
  // Keep the interface node exactly at zero; accumulated rounding in the
  // loop above is below 1e-12 but the reflected coefficient kinks there.
  g.x[g.steps_per_side] = 0.0;
  return g;
}

}  // namespace

std::vector<InterfaceCandidate> solve_interface(const InterfaceProblem& p, double window_lo,
                                                double window_hi) {
  if (!(window_lo < window_hi)) {
    throw Error(ErrorCode::InvalidArgument, "interface search window is empty");
  }
  const Grid grid = make_grid(p);
  const std::size_t node_count = grid.x.size();
  const bool dirichlet = p.boundary == Boundary::Dirichlet;

  // Unknowns: interior nodes for Dirichlet, every node for Neumann.
  const std::size_t offset = dirichlet ? 1 : 0;
  const std::size_t dim = dirichlet ? node_count - 2 : node_count;

  std::vector<double> coeff(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    coeff[i] = p.coefficient.evaluator(grid.x[i + offset]);
  }

  const double inv_h2 = 1.0 / (p.h * p.h);
  std::vector<double> diag(dim, 2.0 * inv_h2);
  std::vector<double> off(dim - 1, -inv_h2);
  if (!dirichlet) {
    // Mirror condition u'( +-L ) = 0 halves the boundary diagonal.
    diag.front() = inv_h2;
    diag.back() = inv_h2;
  }

  std::vector<double> weight;
  if (p.generalized) {
    weight = coeff;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(weight[i] > 0.0)) {
        throw Error(ErrorCode::NonPositiveWeight,
                    "generalized interface weight is not strictly positive at x = " +
                        std::to_string(grid.x[i + offset]));
      }
    }
    // Symmetrized pencil: diag(w)^{-1/2} T diag(w)^{-1/2}.
    for (std::size_t i = 0; i < dim; ++i) {
      diag[i] /= weight[i];
    }
    for (std::size_t i = 0; i + 1 < dim; ++i) {
      off[i] /= std::sqrt(weight[i] * weight[i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < dim; ++i) {
      diag[i] += coeff[i];
    }
  }

  const std::vector<double> spectrum = numerics::symmetric_tridiagonal_eigenvalues(diag, off);

  std::vector<InterfaceCandidate> out;
  for (double lambda : spectrum) {
    if (lambda < window_lo || lambda > window_hi) {
      continue;
    }
    auto [refined, vec] = numerics::tridiagonal_inverse_iteration(diag, off, lambda);
    if (p.generalized) {
      for (std::size_t i = 0; i < dim; ++i) {
        vec[i] /= std::sqrt(weight[i]);
      }
      double norm = 0.0;
      for (double v : vec) {
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (double& v : vec) {
        v /= norm;
      }
    }

    InterfaceCandidate cand;
    cand.lambda = refined;
    cand.x = grid.x;
    cand.values.assign(node_count, 0.0);
    std::copy(vec.begin(), vec.end(), cand.values.begin() + static_cast<std::ptrdiff_t>(offset));

    double peak = 0.0;
    for (double v : cand.values) {
      peak = std::max(peak, std::fabs(v));
    }
    // Largest amplitude within one unit of either end. A single outermost
    // node would scale with h near a Dirichlet wall and hide wall-state
    // contamination; the unit-interval maximum is grid-independent.
    double edge = 0.0;
    for (std::size_t i = 0; i < node_count; ++i) {
      if (std::fabs(grid.x[i]) >= grid.half_width - 1.0) {
        edge = std::max(edge, std::fabs(cand.values[i]));
      }
    }
    cand.boundary_fraction = peak > 0.0 ? edge / peak : 0.0;
    out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(),
            [](const InterfaceCandidate& a, const InterfaceCandidate& b) {
              return a.lambda < b.lambda;
            });
  return out;
}

std::vector<InterfaceMode> classify_modes(const std::vector<InterfaceCandidate>& candidates,
                                          const supercell::GapSet& gaps) {
  constexpr double kFlatRate = -1e-3;
  constexpr double kBoundaryTol = 1e-3;
  // Above kBoundaryTol the mode cannot be certified at this half-width. Up
  // to kWallDominated that is a near miss: a genuine localized mode whose
  // tail has not quite died out, where enlarging the domain is the remedy
  // and silence would hide a fixable problem. Beyond kWallDominated the
  // state carries macroscopic amplitude at the wall (a boundary artifact or
  // a band-edge state leaking into the gap), which no feasible enlargement
  // rescues, so it is dropped like the flat ones.
  constexpr double kWallDominated = 0.05;

  std::vector<InterfaceMode> out;
  for (const InterfaceCandidate& cand : candidates) {
    const supercell::Gap* containing = nullptr;
    for (const supercell::Gap& gap : gaps.gaps) {
      if (cand.lambda > gap.lo && cand.lambda < gap.hi) {
        containing = &gap;
        break;
      }
    }
    if (containing == nullptr) {
      continue;
    }

    // Envelope fit on each half-axis against distance from the interface.
    // The first unit is skipped (the mode core is not yet asymptotic), as is
    // the outermost unit where the boundary condition bends the solution.
    const double half_width = cand.x.back();
    std::vector<std::pair<double, double>> right;
    std::vector<std::pair<double, double>> left;
    for (std::size_t i = 0; i < cand.x.size(); ++i) {
      const double ax = std::fabs(cand.x[i]);
      if (ax < 1.0 || ax > half_width - 1.0) {
        continue;
      }
      if (cand.x[i] > 0.0) {
        right.emplace_back(ax, std::fabs(cand.values[i]));
      } else {
        left.emplace_back(ax, std::fabs(cand.values[i]));
      }
    }
    if (right.size() < 8 || left.size() < 8) {
      continue;
    }
    std::sort(left.begin(), left.end());
    const numerics::EnvelopeFit fit_r = numerics::fit_exponential_envelope(right);
    const numerics::EnvelopeFit fit_l = numerics::fit_exponential_envelope(left);
    if (fit_r.rate >= kFlatRate || fit_l.rate >= kFlatRate) {
      // Flat in-gap vectors are truncation artifacts, not localized modes.
      continue;
    }
    if (cand.boundary_fraction > kWallDominated) {
      continue;
    }
    if (cand.boundary_fraction > kBoundaryTol) {
      throw Error(ErrorCode::TruncationSuspect,
                  "in-gap mode near lambda = " + std::to_string(cand.lambda) +
                      " still has relative amplitude " +
                      std::to_string(cand.boundary_fraction) +
                      " at the domain edge; enlarge the half-width");
    }

    InterfaceMode mode;
    mode.lambda = cand.lambda;
    mode.x = cand.x;
    mode.values = cand.values;
    mode.decay_rate = 0.5 * (fit_r.rate + fit_l.rate);
    mode.gap = *containing;
    mode.isolation_margin = std::min(cand.lambda - containing->lo, containing->hi - cand.lambda);
    mode.boundary_fraction = cand.boundary_fraction;
    out.push_back(std::move(mode));
  }
  std::sort(out.begin(), out.end(),
            [](const InterfaceMode& a, const InterfaceMode& b) { return a.lambda < b.lambda; });
  return out;
}

double compare_decay(const InterfaceMode& mode, double estimated_rate) {
  if (estimated_rate == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "decay comparison needs a nonzero estimate");
  }
  return std::fabs(mode.decay_rate - estimated_rate) / std::fabs(estimated_rate);
}

}  // namespace qpspec::interface
