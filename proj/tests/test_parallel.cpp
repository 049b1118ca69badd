#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
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

constexpr double kTwoPi = 6.283185307179586476925286766559;
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

sc::BlochProblem sample_bloch(int q_level, int points_per_unit, double alpha_frac) {
  const auto field = pot::CoefficientField::preset("sin2d", kGolden);
  const auto approx = cf::convergents(cf::cf_elements("golden", 10), q_level + 1).back();
  const std::size_t n = static_cast<std::size_t>(points_per_unit) *
                        static_cast<std::size_t>(approx.q);
  const double h = static_cast<double>(approx.q) / static_cast<double>(n);
  const auto coeff = pot::periodic_approximant(field, approx);
  sc::BlochProblem problem;
  problem.h = h;
  problem.potential.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    problem.potential[i] = coeff(static_cast<double>(i) * h);
  problem.alpha = alpha_frac * kTwoPi / static_cast<double>(approx.q);
  return problem;
}

// Bitwise agreement, not approximate: the parallel loops must not reorder
// any floating-point arithmetic.
bool identical(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

struct ThreadSetup {
  ThreadSetup() {
#ifdef _OPENMP
    omp_set_num_threads(4);
#endif
  }
};

const ThreadSetup setup;

}  // namespace

TEST_CASE("complex Hermitian eigensolve is bitwise identical across thread counts") {
  const auto problem = sample_bloch(6, 12, 0.31);
  const auto a = sc::assemble_bloch(problem);
  REQUIRE(!a.is_real());
  const auto serial = num::hermitian_eigenvalues(a, false);
  const auto parallel = num::hermitian_eigenvalues(a, true);
  CHECK(identical(serial.eigenvalues, parallel.eigenvalues));
}

TEST_CASE("real symmetric path is bitwise identical across thread counts") {
  const auto problem = sample_bloch(5, 15, 0.0);
  const auto a = sc::assemble_bloch(problem);
  REQUIRE(a.is_real());
  const auto serial = num::hermitian_eigenvalues(a, false);
  const auto parallel = num::hermitian_eigenvalues(a, true);
  CHECK(identical(serial.eigenvalues, parallel.eigenvalues));
}

TEST_CASE("weighted pencil solve is bitwise identical across thread counts") {
  const auto problem = sample_bloch(5, 12, 0.17);
  const auto a = sc::assemble_bloch(problem);
  std::vector<double> weight(a.size());
  for (std::size_t i = 0; i < weight.size(); ++i)
    weight[i] = 3.0 + std::sin(kTwoPi * static_cast<double>(i) / 7.0);
  const auto serial = num::generalized_hermitian_eigenvalues(a, weight, false);
  const auto parallel = num::generalized_hermitian_eigenvalues(a, weight, true);
  CHECK(identical(serial.eigenvalues, parallel.eigenvalues));
}

TEST_CASE("band diagrams are bitwise identical across thread counts") {
  const auto field = pot::CoefficientField::preset("sin2d", kGolden);
  const auto approx = cf::convergents(cf::cf_elements("golden", 6), 5).back();
  const auto serial = sc::band_diagram(field, approx, 8, 20, 15, false, false);
  const auto parallel = sc::band_diagram(field, approx, 8, 20, 15, false, true);
  REQUIRE(serial.bands.size() == parallel.bands.size());
  for (std::size_t j = 0; j < serial.bands.size(); ++j)
    CHECK(identical(serial.bands[j], parallel.bands[j]));
}

TEST_CASE("superspace spectra are bitwise identical across thread counts") {
  const auto field = pot::CoefficientField::preset("sin2d", kGolden);

  ss::LiftedProblem fd(field);
  fd.h = 0.04;
  const auto fd_serial = ss::superspace_spectrum_fd(fd, 30, false);
  const auto fd_parallel = ss::superspace_spectrum_fd(fd, 30, true);
  CHECK(identical(fd_serial.eigenvalues, fd_parallel.eigenvalues));

  ss::PlaneWaveProblem pw(field);
  pw.n_pw = 7;
  const auto pw_serial = ss::superspace_spectrum_pwe(pw, 30, false);
  const auto pw_parallel = ss::superspace_spectrum_pwe(pw, 30, true);
  CHECK(identical(pw_serial.eigenvalues, pw_parallel.eigenvalues));
}

TEST_CASE("independent Jacobi solver confirms the production eigenvalues") {
  const auto problem = sample_bloch(5, 10, 0.23);
  const auto a = sc::assemble_bloch(problem);
  const auto jac = qpspec::reference::hermitian_eigenvalues_jacobi(a);
  const auto ql = num::hermitian_eigenvalues(a, true);
  REQUIRE(jac.eigenvalues.size() == ql.eigenvalues.size());
  double scale = 1.0;
  for (double v : ql.eigenvalues) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < ql.eigenvalues.size(); ++i)
    CHECK(std::fabs(jac.eigenvalues[i] - ql.eigenvalues[i]) <= 1e-10 * scale);
}
