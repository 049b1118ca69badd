#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qpspec/numerics.hpp"
#include "qpspec/potentials.hpp"
#include "qpspec/supercell.hpp"

namespace qpspec::superspace {

inline constexpr double kDefaultMeshSize = 0.02;
inline constexpr int kDefaultPlaneWaves = 50;

// Periodic lift of the operator to the unit 2-torus, discretized on a
// rectangular mesh whose x and y step sizes keep the ratio close to 1/theta.
// The directional stencil advances one cell in x and one in y per hop, so the
// mesh slope n_x / n_y plays the role of theta for the discrete operator.
struct LiftedProblem {
  explicit LiftedProblem(potentials::CoefficientField f) : field(std::move(f)) {}

  potentials::CoefficientField field;
  double alpha = 0.0;
  double beta = 0.0;
  double h = kDefaultMeshSize;
  bool generalized = false;
};

struct LiftedMesh {
  int n_x = 0;
  int n_y = 0;
  double h_x = 0.0;
  double h_y = 0.0;
  // Slope realized by the snapped mesh, n_x / n_y. The snap error against the
  // field's slope is O(h) and callers report it alongside results.
  double theta_mesh = 0.0;
};

// Snaps the target spacings to the torus: n_x = round(1/h) cells of width
// 1/n_x in x, n_y = round(1/(theta h)) cells of width 1/n_y in y. Throws
// MeshTooCoarse when either count drops below 8.
LiftedMesh lifted_mesh(const LiftedProblem& p);

// Full (n_x n_y) x (n_x n_y) matrix of the lifted operator. Site (i, j) maps
// to row i * n_y + j. Hops that wrap in x pick up a factor e^{i alpha}, hops
// that wrap in y pick up e^{i beta}, and a corner crossing picks up both.
// With generalized set the potential is dropped (the field samples enter the
// weight instead; see lifted_weights).
numerics::HermitianMatrix assemble_lifted_fd(const LiftedProblem& p);

// Field samples on the mesh in the same row layout, used as the generalized
// weight diagonal.
std::vector<double> lifted_weights(const LiftedProblem& p);

// Spectrum of the lifted operator. The sites split into gcd(n_x, n_y)
// independent diagonal chains of length lcm(n_x, n_y); each chain is a 1D
// Bloch problem, which keeps the dense solves at chain size instead of grid
// size. Returns the lowest n_eigs eigenvalues (all of them when n_eigs
// exceeds the grid size).
numerics::SpectrumSample superspace_spectrum_fd(const LiftedProblem& p, int n_eigs,
                                                bool parallel = true);

// Plane-wave discretization over the basis e^{i((2 pi m + alpha) x +
// (2 pi n + beta) y)} with |m|, |n| <= n_pw, so (2 n_pw + 1)^2 modes in
// total. The kinetic part is the exact diagonal
// ((2 pi m + alpha) + theta (2 pi n + beta))^2; the field enters as the
// convolution matrix of its Fourier coefficients.
struct PlaneWaveProblem {
  explicit PlaneWaveProblem(potentials::CoefficientField f) : field(std::move(f)) {}

  potentials::CoefficientField field;
  double alpha = 0.0;
  double beta = 0.0;
  int n_pw = kDefaultPlaneWaves;
  bool generalized = false;
};

numerics::HermitianMatrix assemble_plane_wave(const PlaneWaveProblem& p);

// Convolution matrix of the field alone (the generalized weight side of the
// pencil).
numerics::HermitianMatrix plane_wave_weight(const PlaneWaveProblem& p);

// Lowest n_eigs eigenvalues of the plane-wave discretization. The generalized
// pencil reduces through the weight matrix's Cholesky factor and throws
// IndefiniteWeight when truncation has destroyed positivity.
numerics::SpectrumSample superspace_spectrum_pwe(const PlaneWaveProblem& p, int n_eigs,
                                                 bool parallel = true);

// Eigenvalue counts strictly inside each gap by more than `margin`, for two
// spectra side by side. Used to demonstrate that the plane-wave route pollutes
// gaps that the finite-difference route keeps clean.
struct PollutionEntry {
  supercell::Gap gap;
  int fd_count = 0;
  int pwe_count = 0;
};

std::vector<PollutionEntry> pollution_report(const std::vector<double>& fd_spectrum,
                                             const std::vector<double>& pwe_spectrum,
                                             const supercell::GapSet& gaps, double margin);

// One eigenpair of the truncated plane-wave matrix nearest `shift`. A finite
// Fourier series couples only nearby modes, so in mode-major ordering the
// matrix is banded and the solve stays cheap even at the default truncation
// (dim 101^2), where a dense solve is impractical. The reported residual
// ||A v - lambda v|| bounds the distance from lambda to a true eigenvalue of
// the truncated matrix. Standard problems only.
struct PlaneWaveMode {
  double lambda = 0.0;
  double residual = 0.0;
};

PlaneWaveMode plane_wave_eigenvalue_near(const PlaneWaveProblem& p, double shift);

// One eigenpair of the lifted FD operator near lambda_near, by inverse
// iteration on the full assembled matrix.
struct LiftedMode {
  double lambda = 0.0;
  LiftedMesh mesh;
  std::vector<numerics::Complex> values;
};

LiftedMode lifted_mode_fd(const LiftedProblem& p, double lambda_near);

// Restriction of a mode to the diagonal chain through the origin: samples at
// (t h_x, t h_y) for t = 0 .. lcm(n_x, n_y) - 1, returned as (x, u) pairs.
std::vector<std::pair<double, numerics::Complex>> mode_diagonal_trace(const LiftedMode& mode);

}  // namespace qpspec::superspace
