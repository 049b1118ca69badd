#include "qpspec/superspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "qpspec/error.hpp"

namespace qpspec::superspace {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Chain {
  std::vector<std::size_t> sites;  // row indices into the full grid layout
  supercell::BlochProblem problem;
};

// The stencil couples (i, j) only to (i+1, j+1) and (i-1, j-1), so the grid
// splits into gcd(n_x, n_y) cyclic chains of length lcm(n_x, n_y). Chain s
// starts at (s, 0); walking it wraps x exactly L/n_x times and y L/n_y times,
// so the accumulated Bloch phase is alpha L/n_x + beta L/n_y, which the 1D
// problem realizes through its own momentum alpha_chain = phase / (L h_x).
std::vector<Chain> build_chains(const LiftedProblem& p, const LiftedMesh& mesh) {
  const int g = std::gcd(mesh.n_x, mesh.n_y);
  const long long length = static_cast<long long>(mesh.n_x) / g * mesh.n_y;
  const double phase = p.alpha * (static_cast<double>(length) / mesh.n_x) +
                       p.beta * (static_cast<double>(length) / mesh.n_y);
  std::vector<Chain> chains(static_cast<std::size_t>(g));
  for (int s = 0; s < g; ++s) {
    Chain& chain = chains[static_cast<std::size_t>(s)];
    chain.sites.resize(static_cast<std::size_t>(length));
    std::vector<double> samples(static_cast<std::size_t>(length));
    for (long long t = 0; t < length; ++t) {
      const int i = static_cast<int>((s + t) % mesh.n_x);
      const int j = static_cast<int>(t % mesh.n_y);
      chain.sites[static_cast<std::size_t>(t)] =
          static_cast<std::size_t>(i) * static_cast<std::size_t>(mesh.n_y) +
          static_cast<std::size_t>(j);
      samples[static_cast<std::size_t>(t)] =
          p.field(i * mesh.h_x, j * mesh.h_y);
    }
    chain.problem.h = mesh.h_x;
    chain.problem.alpha = phase / (static_cast<double>(length) * mesh.h_x);
    if (p.generalized) {
      chain.problem.potential.assign(static_cast<std::size_t>(length), 0.0);
      chain.problem.weight = std::move(samples);
    } else {
      chain.problem.potential = std::move(samples);
      chain.problem.weight.assign(static_cast<std::size_t>(length), 1.0);
    }
  }
  return chains;
}

}  // namespace

LiftedMesh lifted_mesh(const LiftedProblem& p) {
  if (!(p.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "mesh size must be positive");
  const double theta = p.field.theta();
  if (!(theta > 0.0))
    throw Error(ErrorCode::InvalidArgument, "lifted mesh needs a positive slope");
  LiftedMesh mesh;
  mesh.n_x = static_cast<int>(std::lround(1.0 / p.h));
  mesh.n_y = static_cast<int>(std::lround(1.0 / (theta * p.h)));
  if (mesh.n_x < 8 || mesh.n_y < 8)
    throw Error(ErrorCode::MeshTooCoarse,
                "lifted mesh needs at least 8 cells per direction, got " +
                    std::to_string(mesh.n_x) + " x " + std::to_string(mesh.n_y));
  mesh.h_x = 1.0 / mesh.n_x;
  mesh.h_y = 1.0 / mesh.n_y;
  mesh.theta_mesh = static_cast<double>(mesh.n_x) / mesh.n_y;
  return mesh;
}

numerics::HermitianMatrix assemble_lifted_fd(const LiftedProblem& p) {
  const LiftedMesh mesh = lifted_mesh(p);
  const std::size_t nx = static_cast<std::size_t>(mesh.n_x);
  const std::size_t ny = static_cast<std::size_t>(mesh.n_y);
  const std::size_t dim = nx * ny;
  const double inv_h2 = 1.0 / (mesh.h_x * mesh.h_x);
  numerics::HermitianMatrix a(dim);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t row = i * ny + j;
      const double v = p.generalized ? 0.0 : p.field(i * mesh.h_x, j * mesh.h_y);
      a(row, row) = numerics::Complex(2.0 * inv_h2 + v, 0.0);
      // Forward hop to (i+1, j+1); the backward hop is its conjugate and the
      // loop over all sites fills both triangles.
      const std::size_t ip = (i + 1) % nx;
      const std::size_t jp = (j + 1) % ny;
      double phase = 0.0;
      if (i + 1 == nx) phase += p.alpha;
      if (j + 1 == ny) phase += p.beta;
      const numerics::Complex hop =
          -inv_h2 * numerics::Complex(std::cos(phase), std::sin(phase));
      const std::size_t col = ip * ny + jp;
      a(row, col) += hop;
      a(col, row) += std::conj(hop);
    }
  }
  if (!a.is_hermitian(1e-10))
    throw Error(ErrorCode::NonHermitianInput, "lifted assembly lost Hermitian symmetry");
  return a;
}

std::vector<double> lifted_weights(const LiftedProblem& p) {
  const LiftedMesh mesh = lifted_mesh(p);
  std::vector<double> w(static_cast<std::size_t>(mesh.n_x) * mesh.n_y);
  for (int i = 0; i < mesh.n_x; ++i)
    for (int j = 0; j < mesh.n_y; ++j)
      w[static_cast<std::size_t>(i) * mesh.n_y + j] = p.field(i * mesh.h_x, j * mesh.h_y);
  return w;
}

numerics::SpectrumSample superspace_spectrum_fd(const LiftedProblem& p, int n_eigs,
                                                bool parallel) {
  if (n_eigs <= 0) throw Error(ErrorCode::InvalidArgument, "need at least one eigenvalue");
  const LiftedMesh mesh = lifted_mesh(p);
  auto chains = build_chains(p, mesh);
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(mesh.n_x) * mesh.n_y);
  for (const auto& chain : chains) {
    const auto eigs = supercell::bloch_eigenvalues(chain.problem, parallel);
    all.insert(all.end(), eigs.begin(), eigs.end());
  }
  std::sort(all.begin(), all.end());
  if (all.size() > static_cast<std::size_t>(n_eigs)) all.resize(static_cast<std::size_t>(n_eigs));
  return numerics::SpectrumSample{std::move(all)};
}

namespace {

struct ModeIndex {
  int lo = 0;
  int count = 0;
};

ModeIndex mode_range(int n_pw) {
  ModeIndex r;
  r.lo = -n_pw;
  r.count = 2 * n_pw + 1;
  return r;
}

}  // namespace

numerics::HermitianMatrix assemble_plane_wave(const PlaneWaveProblem& p) {
  if (p.n_pw < 2)
    throw Error(ErrorCode::TruncationTooSmall, "plane-wave truncation order must be at least 2");
  const ModeIndex r = mode_range(p.n_pw);
  const double theta = p.field.theta();
  const std::size_t dim = static_cast<std::size_t>(r.count) * r.count;
  numerics::HermitianMatrix a(dim);
  for (int m = 0; m < r.count; ++m) {
    for (int n = 0; n < r.count; ++n) {
      const std::size_t row = static_cast<std::size_t>(m) * r.count + n;
      const double kx = kTwoPi * (r.lo + m) + p.alpha;
      const double ky = kTwoPi * (r.lo + n) + p.beta;
      const double momentum = kx + theta * ky;
      a(row, row) = numerics::Complex(momentum * momentum, 0.0);
    }
  }
  if (!p.generalized) {
    for (const auto& term : p.field.fourier_terms()) {
      for (int m = 0; m < r.count; ++m) {
        const int mp = m + term.m;
        if (mp < 0 || mp >= r.count) continue;
        for (int n = 0; n < r.count; ++n) {
          const int np = n + term.n;
          if (np < 0 || np >= r.count) continue;
          const std::size_t row = static_cast<std::size_t>(mp) * r.count + np;
          const std::size_t col = static_cast<std::size_t>(m) * r.count + n;
          a(row, col) += term.c;
        }
      }
    }
  }
  if (!a.is_hermitian(1e-10))
    throw Error(ErrorCode::NonHermitianInput, "plane-wave assembly lost Hermitian symmetry");
  return a;
}

numerics::HermitianMatrix plane_wave_weight(const PlaneWaveProblem& p) {
  if (p.n_pw < 2)
    throw Error(ErrorCode::TruncationTooSmall, "plane-wave truncation order must be at least 2");
  const ModeIndex r = mode_range(p.n_pw);
  const std::size_t dim = static_cast<std::size_t>(r.count) * r.count;
  numerics::HermitianMatrix b(dim);
  for (const auto& term : p.field.fourier_terms()) {
    for (int m = 0; m < r.count; ++m) {
      const int mp = m + term.m;
      if (mp < 0 || mp >= r.count) continue;
      for (int n = 0; n < r.count; ++n) {
        const int np = n + term.n;
        if (np < 0 || np >= r.count) continue;
        const std::size_t row = static_cast<std::size_t>(mp) * r.count + np;
        const std::size_t col = static_cast<std::size_t>(m) * r.count + n;
        b(row, col) += term.c;
      }
    }
  }
  return b;
}

numerics::SpectrumSample superspace_spectrum_pwe(const PlaneWaveProblem& p, int n_eigs,
                                                 bool parallel) {
  if (n_eigs <= 0) throw Error(ErrorCode::InvalidArgument, "need at least one eigenvalue");
  const auto a = assemble_plane_wave(p);
  numerics::SpectrumSample sample;
  if (p.generalized) {
    sample = numerics::generalized_hermitian_eigenvalues(a, plane_wave_weight(p), parallel);
  } else {
    sample = numerics::hermitian_eigenvalues(a, parallel);
  }
  if (sample.eigenvalues.size() > static_cast<std::size_t>(n_eigs))
    sample.eigenvalues.resize(static_cast<std::size_t>(n_eigs));
  return sample;
}

PlaneWaveMode plane_wave_eigenvalue_near(const PlaneWaveProblem& p, double shift) {
  if (p.generalized)
    throw Error(ErrorCode::InvalidArgument,
                "targeted plane-wave solve supports the standard problem only");
  if (p.n_pw < 2)
    throw Error(ErrorCode::TruncationTooSmall, "plane-wave truncation order must be at least 2");
  const ModeIndex r = mode_range(p.n_pw);
  const double theta = p.field.theta();
  const std::size_t dim = static_cast<std::size_t>(r.count) * r.count;
  std::size_t bw = 1;
  for (const auto& term : p.field.fourier_terms())
    bw = std::max(bw, static_cast<std::size_t>(std::abs(term.m)) * r.count +
                          static_cast<std::size_t>(std::abs(term.n)));
  numerics::BandedHermitian a(dim, bw);
  for (int m = 0; m < r.count; ++m) {
    for (int n = 0; n < r.count; ++n) {
      const std::size_t row = static_cast<std::size_t>(m) * r.count + n;
      const double kx = kTwoPi * (r.lo + m) + p.alpha;
      const double ky = kTwoPi * (r.lo + n) + p.beta;
      const double momentum = kx + theta * ky;
      a.set(row, row, numerics::Complex(momentum * momentum, 0.0));
    }
  }
  for (const auto& term : p.field.fourier_terms()) {
    for (int m = 0; m < r.count; ++m) {
      const int mp = m + term.m;
      if (mp < 0 || mp >= r.count) continue;
      for (int n = 0; n < r.count; ++n) {
        const int np = n + term.n;
        if (np < 0 || np >= r.count) continue;
        const std::size_t row = static_cast<std::size_t>(mp) * r.count + np;
        const std::size_t col = static_cast<std::size_t>(m) * r.count + n;
        a.set(row, col, a.get(row, col) + term.c);
      }
    }
  }
  if (a.max_asymmetry() > 1e-10)
    throw Error(ErrorCode::NonHermitianInput, "plane-wave assembly lost Hermitian symmetry");

  const auto [lambda, vec] = numerics::banded_inverse_iteration(a, shift);
  const auto av = a.apply(vec);
  double res = 0.0;
  for (std::size_t i = 0; i < dim; ++i) res += std::norm(av[i] - lambda * vec[i]);
  return PlaneWaveMode{lambda, std::sqrt(res)};
}

std::vector<PollutionEntry> pollution_report(const std::vector<double>& fd_spectrum,
                                             const std::vector<double>& pwe_spectrum,
                                             const supercell::GapSet& gaps, double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "margin must be nonnegative");
  std::vector<PollutionEntry> report;
  report.reserve(gaps.gaps.size());
  for (const auto& gap : gaps.gaps) {
    PollutionEntry entry;
    entry.gap = gap;
    for (double lambda : fd_spectrum)
      if (lambda > gap.lo + margin && lambda < gap.hi - margin) ++entry.fd_count;
    for (double lambda : pwe_spectrum)
      if (lambda > gap.lo + margin && lambda < gap.hi - margin) ++entry.pwe_count;
    report.push_back(entry);
  }
  return report;
}

LiftedMode lifted_mode_fd(const LiftedProblem& p, double lambda_near) {
  LiftedMode mode;
  mode.mesh = lifted_mesh(p);
  const auto a = assemble_lifted_fd(p);
  if (p.generalized) {
    // Fold the weight into a symmetric reduction so the shifted solve stays
    // Hermitian: B^{-1/2} A B^{-1/2} shares eigenvalues with the pencil and
    // its eigenvectors map back through B^{-1/2}.
    const auto w = lifted_weights(p);
    const std::size_t dim = a.size();
    numerics::HermitianMatrix reduced(dim);
    std::vector<double> inv_sqrt(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(w[i] > 0.0))
        throw Error(ErrorCode::NonPositiveWeight, "weight must be positive on the mesh");
      inv_sqrt[i] = 1.0 / std::sqrt(w[i]);
    }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) reduced(i, j) = a(i, j) * inv_sqrt[i] * inv_sqrt[j];
    auto [lambda, vec] = numerics::inverse_iteration(reduced, lambda_near);
    for (std::size_t i = 0; i < dim; ++i) vec[i] *= inv_sqrt[i];
    double norm = 0.0;
    for (const auto& z : vec) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (auto& z : vec) z /= norm;
    mode.lambda = lambda;
    mode.values = std::move(vec);
    return mode;
  }
  auto [lambda, vec] = numerics::inverse_iteration(a, lambda_near);
  mode.lambda = lambda;
  mode.values = std::move(vec);
  return mode;
}

std::vector<std::pair<double, numerics::Complex>> mode_diagonal_trace(const LiftedMode& mode) {
  const int g = std::gcd(mode.mesh.n_x, mode.mesh.n_y);
  const long long length = static_cast<long long>(mode.mesh.n_x) / g * mode.mesh.n_y;
  std::vector<std::pair<double, numerics::Complex>> trace;
  trace.reserve(static_cast<std::size_t>(length));
  for (long long t = 0; t < length; ++t) {
    const std::size_t i = static_cast<std::size_t>(t % mode.mesh.n_x);
    const std::size_t j = static_cast<std::size_t>(t % mode.mesh.n_y);
    trace.emplace_back(static_cast<double>(t) * mode.mesh.h_x,
                       mode.values[i * static_cast<std::size_t>(mode.mesh.n_y) + j]);
  }
  return trace;
}

}  // namespace qpspec::superspace
