// Timing comparison between the OpenMP kernels and their serial twins, plus
// the cross-check Jacobi eigensolver. The parallel and serial paths are
// required to agree bitwise, so the table also reports the largest observed
// difference (which must print as 0).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "qpspec/contfrac.hpp"
#include "qpspec/numerics.hpp"
#include "qpspec/potentials.hpp"
#include "qpspec/reference.hpp"
#include "qpspec/supercell.hpp"
#include "qpspec/superspace.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace num = qpspec::numerics;
namespace pot = qpspec::potentials;
namespace sc = qpspec::supercell;
namespace ss = qpspec::superspace;
namespace cf = qpspec::contfrac;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

sc::BlochProblem bloch_at_size(const pot::CoefficientField& field,
                               const cf::RationalApproximant& approx, int points_per_unit) {
  const std::size_t n = static_cast<std::size_t>(points_per_unit) *
                        static_cast<std::size_t>(approx.q);
  const double h = static_cast<double>(approx.q) / static_cast<double>(n);
  const auto coeff = pot::periodic_approximant(field, approx);
  sc::BlochProblem problem;
  problem.h = h;
  problem.potential.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    problem.potential[i] = coeff(static_cast<double>(i) * h);
  // An interior quasi-momentum keeps the matrix genuinely complex.
  problem.alpha = 0.37 * 2.0 * 3.141592653589793 / static_cast<double>(approx.q);
  return problem;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run the same serial path.\n\n");
#endif

  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const auto field = pot::CoefficientField::preset("sin2d", golden);
  const auto approx = cf::convergents(cf::cf_elements("golden", 8), 7).back();

  std::printf("dense Hermitian eigensolve (Householder + QL)\n");
  std::printf("%8s %12s %12s %9s %10s\n", "size", "serial [s]", "parallel [s]", "speedup",
              "max diff");
  for (int ppu : {10, 16, 24, 32}) {
    const auto problem = bloch_at_size(field, approx, ppu);
    const auto a = sc::assemble_bloch(problem);

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = num::hermitian_eigenvalues(a, false);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = num::hermitian_eigenvalues(a, true);
    const double tp = seconds_since(t0);

    std::printf("%8zu %12.4f %12.4f %9.2f %10.3g\n", a.size(), ts, tp, ts / tp,
                max_abs_diff(serial.eigenvalues, parallel.eigenvalues));
  }

  std::printf("\nband diagram (per-cell assembly + eigensolves)\n");
  std::printf("%8s %12s %12s %9s %10s\n", "matrix", "serial [s]", "parallel [s]", "speedup",
              "max diff");
  for (int ppu : {15, 25}) {
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = sc::band_diagram(field, approx, 12, 60, ppu, false, false);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = sc::band_diagram(field, approx, 12, 60, ppu, false, true);
    const double tp = seconds_since(t0);

    double diff = 0.0;
    for (std::size_t j = 0; j < serial.bands.size(); ++j)
      diff = std::max(diff, max_abs_diff(serial.bands[j], parallel.bands[j]));
    std::printf("%8d %12.4f %12.4f %9.2f %10.3g\n", ppu * static_cast<int>(approx.q), ts, tp,
                ts / tp, diff);
  }

  std::printf("\nsuperspace finite differences (chain decomposition)\n");
  std::printf("%8s %12s %12s %9s %10s\n", "h", "serial [s]", "parallel [s]", "speedup",
              "max diff");
  for (double h : {0.02, 0.015}) {
    ss::LiftedProblem p(field);
    p.h = h;

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = ss::superspace_spectrum_fd(p, 60, false);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = ss::superspace_spectrum_fd(p, 60, true);
    const double tp = seconds_since(t0);

    std::printf("%8.3f %12.4f %12.4f %9.2f %10.3g\n", h, ts, tp, ts / tp,
                max_abs_diff(serial.eigenvalues, parallel.eigenvalues));
  }

  std::printf("\ncross-check eigensolver (cyclic Jacobi) vs production path\n");
  std::printf("%8s %12s %12s %10s\n", "size", "jacobi [s]", "ql [s]", "max diff");
  {
    const auto problem = bloch_at_size(field, approx, 10);
    const auto a = sc::assemble_bloch(problem);

    auto t0 = std::chrono::steady_clock::now();
    const auto jac = qpspec::reference::hermitian_eigenvalues_jacobi(a);
    const double tj = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto ql = num::hermitian_eigenvalues(a, true);
    const double tq = seconds_since(t0);

    std::printf("%8zu %12.4f %12.4f %10.3g\n", a.size(), tj, tq,
                max_abs_diff(jac.eigenvalues, ql.eigenvalues));
  }
  return 0;
}
