#pragma once

#include <utility>
#include <vector>

#include "qpspec/potentials.hpp"
#include "qpspec/supercell.hpp"

namespace qpspec::interface {

enum class Boundary { Dirichlet, Neumann };

// Reflected 1D eigenvalue problem on the truncated domain [-L, L]. The
// coefficient is expected to be even (built with potentials::reflect); it
// acts as the potential V in -u'' + V u = lambda u, or as the weight rho in
// -u'' = lambda rho u when `generalized` is set.
struct InterfaceProblem {
  explicit InterfaceProblem(potentials::Coefficient1D c) : coefficient(std::move(c)) {}

  potentials::Coefficient1D coefficient;
  double half_width = 34.0;
  double h = 0.005;
  Boundary boundary = Boundary::Dirichlet;
  bool generalized = false;
};

// Raw eigenpair of the truncated problem, before any gap classification.
// x runs from -L to L inclusive; values have unit Euclidean norm.
// boundary_fraction is the largest |u| within one unit of either end,
// relative to max |u|: the truncation-validity measure.
struct InterfaceCandidate {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<double> values;
  double boundary_fraction = 0.0;
};

// A candidate certified to sit inside a gap with a decaying envelope.
struct InterfaceMode {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<double> values;
  // Mean of the two half-axis envelope slopes of log|u| against |x|;
  // negative for a genuinely localized mode.
  double decay_rate = 0.0;
  supercell::Gap gap;
  // Distance from lambda to the nearest edge of its containing gap.
  double isolation_margin = 0.0;
  double boundary_fraction = 0.0;
};

// All eigenpairs of the Dirichlet (or Neumann) finite-difference
// discretization on [-L, L] with eigenvalue in [window_lo, window_hi].
// Eigenvalues come from the tridiagonal QL solver, eigenvectors from
// tridiagonal inverse iteration. The generalized problem is symmetrized
// through diag(rho)^{-1/2} and requires a strictly positive weight.
std::vector<InterfaceCandidate> solve_interface(const InterfaceProblem& p, double window_lo,
                                                double window_hi);

// Keeps candidates lying strictly inside a certified gap whose envelope
// decays on both half-axes (rate < -1e-3) and whose boundary_fraction is at
// most 1e-3. Flat or wall-dominated in-gap vectors are truncation artifacts
// and are dropped. Throws TruncationSuspect for a decaying candidate that
// narrowly misses the boundary-smallness requirement: that is a genuine
// mode the current half-width cannot certify, and enlarging L is the fix.
std::vector<InterfaceMode> classify_modes(const std::vector<InterfaceCandidate>& candidates,
                                          const supercell::GapSet& gaps);

// Relative deviation |fitted - estimated| / |estimated| between the mode's
// fitted decay rate and a transfer-matrix estimate.
double compare_decay(const InterfaceMode& mode, double estimated_rate);

}  // namespace qpspec::interface
