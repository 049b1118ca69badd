#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpspec/numerics.hpp"

using namespace qpspec;
using numerics::Complex;
using numerics::HermitianMatrix;

namespace {

template <typename F>
std::optional<ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

HermitianMatrix random_hermitian(std::size_t n, std::uint32_t seed, bool complex_entries) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HermitianMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = Complex(u(rng), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      Complex v(u(rng), complex_entries ? u(rng) : 0.0);
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("identity matrix has unit eigenvalues") {
  HermitianMatrix a(3);
  for (std::size_t i = 0; i < 3; ++i) a(i, i) = 1.0;
  auto s = numerics::hermitian_eigenvalues(a);
  REQUIRE(s.eigenvalues.size() == 3);
  for (double v : s.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric 0/1 flip matrix has eigenvalues -1 and 1") {
  HermitianMatrix a(2);
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  auto s = numerics::hermitian_eigenvalues(a);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random 4x4 matches characteristic-polynomial bisection") {
  for (std::uint32_t seed : {11u, 12u, 13u}) {
    for (bool cplx : {false, true}) {
      auto a = random_hermitian(4, seed + (cplx ? 100 : 0), cplx);
      auto expected = oracles::hermitian_eigenvalues_bisect(a.data(), 4);
      REQUIRE(expected.size() == 4);
      auto got = numerics::hermitian_eigenvalues(a);
      REQUIRE(got.eigenvalues.size() == 4);
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(got.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("2x2 eigenvalues match the quadratic closed form") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    double p = u(rng), q = u(rng);
    Complex b(u(rng), u(rng));
    HermitianMatrix a(2);
    a(0, 0) = p;
    a(1, 1) = q;
    a(0, 1) = b;
    a(1, 0) = std::conj(b);
    double mid = 0.5 * (p + q);
    double disc = std::sqrt(0.25 * (p - q) * (p - q) + std::norm(b));
    auto s = numerics::hermitian_eigenvalues(a);
    CHECK(std::abs(s.eigenvalues[0] - (mid - disc)) <= 1e-12 * (1.0 + std::abs(mid) + disc));
    CHECK(std::abs(s.eigenvalues[1] - (mid + disc)) <= 1e-12 * (1.0 + std::abs(mid) + disc));
  }
}

TEST_CASE("eigenvalue sum equals trace") {
  std::mt19937 rng(21);
  for (std::size_t n : {1u, 2u, 3u, 5u, 9u, 12u}) {
    auto a = random_hermitian(n, 300 + n, true);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i).real();
    auto s = numerics::hermitian_eigenvalues(a);
    double sum = 0.0;
    for (double v : s.eigenvalues) sum += v;
    CHECK(std::abs(sum - trace) <= 1e-9 * (1.0 + std::abs(trace)));
  }
  (void)rng;
}

TEST_CASE("non-hermitian input is rejected") {
  auto a = random_hermitian(3, 5, true);
  a(0, 2) += Complex(1e-6, 0.0);
  auto code = thrown_code([&] { numerics::hermitian_eigenvalues(a); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::NonHermitianInput);
}

TEST_CASE("zero-dimensional input is rejected") {
  HermitianMatrix a(0);
  auto code = thrown_code([&] { numerics::hermitian_eigenvalues(a); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::DimensionZero);
}

TEST_CASE("generalized solve with diagonal weight: decoupled 2x2") {
  HermitianMatrix a(2);
  a(0, 0) = 4.0;
  a(1, 1) = 9.0;
  auto s = numerics::generalized_hermitian_eigenvalues(a, {1.0, 9.0});
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("uniform weight 2 halves every eigenvalue of the periodic chain") {
  const std::size_t n = 5;
  const double h = 0.25;
  HermitianMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 2.0 / (h * h);
    a(i, (i + 1) % n) = -1.0 / (h * h);
    a((i + 1) % n, i) = -1.0 / (h * h);
  }
  auto plain = numerics::generalized_hermitian_eigenvalues(a, std::vector<double>(n, 1.0));
  auto halved = numerics::generalized_hermitian_eigenvalues(a, std::vector<double>(n, 2.0));
  for (std::size_t i = 0; i < n; ++i)
    CHECK(halved.eigenvalues[i] ==
          doctest::Approx(0.5 * plain.eigenvalues[i]).epsilon(1e-12));
}

TEST_CASE("all-ones weight reproduces the plain solve exactly") {
  auto a = random_hermitian(6, 99, true);
  auto plain = numerics::hermitian_eigenvalues(a);
  auto weighted = numerics::generalized_hermitian_eigenvalues(a, std::vector<double>(6, 1.0));
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(weighted.eigenvalues[i] == plain.eigenvalues[i]);
}

TEST_CASE("non-positive weight is rejected") {
  HermitianMatrix a(2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  auto code =
      thrown_code([&] { numerics::generalized_hermitian_eigenvalues(a, {1.0, 0.0}); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::NonPositiveWeight);
}

TEST_CASE("full-matrix weight agrees with the diagonal path") {
  auto a = random_hermitian(5, 41, true);
  std::vector<double> w = {1.0, 2.0, 0.5, 3.0, 1.5};
  HermitianMatrix b(5);
  for (std::size_t i = 0; i < 5; ++i) b(i, i) = w[i];
  auto lhs = numerics::generalized_hermitian_eigenvalues(a, b);
  auto rhs = numerics::generalized_hermitian_eigenvalues(a, w);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(lhs.eigenvalues[i] == doctest::Approx(rhs.eigenvalues[i]).epsilon(1e-10));
}

TEST_CASE("indefinite full weight is rejected") {
  auto a = random_hermitian(3, 4, false);
  HermitianMatrix b(3);
  b(0, 0) = 1.0;
  b(1, 1) = -1.0;
  b(2, 2) = 1.0;
  auto code = thrown_code([&] { numerics::generalized_hermitian_eigenvalues(a, b); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::IndefiniteWeight);
}

TEST_CASE("hausdorff distance on simple sets") {
  CHECK(numerics::hausdorff_distance({0.0, 1.0}, {0.0, 1.5}, 0.0, 2.0) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(numerics::hausdorff_distance({0.0, 1.0}, {0.0, 1.0}, 0.0, 2.0) == 0.0);
  // window clips the far-away outlier, leaving identical sets
  CHECK(numerics::hausdorff_distance({0.0, 1.0, 50.0}, {0.0, 1.0}, 0.0, 2.0) == 0.0);
}

TEST_CASE("hausdorff distance is a metric on windowed samples") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
  };
  for (int trial = 0; trial < 100; ++trial) {
    auto a = draw(6), b = draw(9), c = draw(4);
    double dab = numerics::hausdorff_distance(a, b, 0.0, 10.0);
    double dba = numerics::hausdorff_distance(b, a, 0.0, 10.0);
    double dac = numerics::hausdorff_distance(a, c, 0.0, 10.0);
    double dcb = numerics::hausdorff_distance(c, b, 0.0, 10.0);
    CHECK(dab >= 0.0);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-15));
    CHECK(dab <= dac + dcb + 1e-12);
    CHECK(numerics::hausdorff_distance(a, a, 0.0, 10.0) == 0.0);
  }
}

TEST_CASE("empty window is rejected") {
  auto code =
      thrown_code([&] { numerics::hausdorff_distance({1.0}, {5.0}, 2.0, 3.0); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::EmptyAfterWindow);
}

TEST_CASE("pure exponential is fitted exactly") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 200; ++i) {
    double x = 0.05 * i;
    s.emplace_back(x, std::exp(-0.5 * x));
  }
  auto fit = numerics::fit_exponential_envelope(s);
  CHECK(std::abs(fit.rate - (-0.5)) <= 1e-6);
  CHECK(std::abs(fit.intercept) <= 1e-6);
}

TEST_CASE("oscillatory signal is fitted through its envelope") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 2000; ++i) {
    double x = 0.01 * i;
    s.emplace_back(x, std::exp(-0.3 * x) * (2.0 + std::cos(7.0 * x)));
  }
  auto fit = numerics::fit_exponential_envelope(s);
  CHECK(std::abs(fit.rate - (-0.3)) <= 0.02);
}

TEST_CASE("sign-alternating samples fit through their magnitude") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 400; ++i) {
    double x = 0.05 * i;
    s.emplace_back(x, (i % 2 ? -1.0 : 1.0) * std::exp(-0.2 * x));
  }
  auto fit = numerics::fit_exponential_envelope(s);
  CHECK(std::abs(fit.rate - (-0.2)) <= 1e-3);
}

TEST_CASE("constant amplitude fits a zero rate") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 50; ++i) s.emplace_back(0.1 * i, 3.0);
  auto fit = numerics::fit_exponential_envelope(s);
  CHECK(std::abs(fit.rate) <= 1e-12);
}

TEST_CASE("envelope fit input validation") {
  auto few = thrown_code([&] {
    numerics::fit_exponential_envelope({{0.0, 1.0}, {1.0, 0.5}});
  });
  REQUIRE(few.has_value());
  CHECK(*few == ErrorCode::InsufficientSamples);

  auto degenerate = thrown_code([&] {
    numerics::fit_exponential_envelope({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}});
  });
  REQUIRE(degenerate.has_value());
  CHECK(*degenerate == ErrorCode::DegenerateFit);

  auto zeros = thrown_code([&] {
    numerics::fit_exponential_envelope({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  });
  REQUIRE(zeros.has_value());
  CHECK(*zeros == ErrorCode::InsufficientSamples);
}

TEST_CASE("tridiagonal QL reproduces the Dirichlet chain spectrum") {
  const std::size_t n = 24;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  auto eig = numerics::symmetric_tridiagonal_eigenvalues(d, e);
  REQUIRE(eig.size() == n);
  std::vector<double> expected;
  for (std::size_t k = 1; k <= n; ++k)
    expected.push_back(2.0 - 2.0 * std::cos(double(k) * M_PI / double(n + 1)));
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < n; ++i)
    CHECK(eig[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("tridiagonal QL matches bisection on a random matrix") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 6;
  std::vector<double> d(n), e(n - 1);
  for (auto& x : d) x = u(rng);
  for (auto& x : e) x = u(rng);
  std::vector<Complex> full(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) full[i * n + i] = d[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    full[i * n + i + 1] = e[i];
    full[(i + 1) * n + i] = e[i];
  }
  auto expected = oracles::hermitian_eigenvalues_bisect(full, n);
  auto got = numerics::symmetric_tridiagonal_eigenvalues(d, e);
  REQUIRE(expected.size() == n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("inverse iteration recovers an interior eigenpair") {
  auto a = random_hermitian(6, 77, true);
  auto s = numerics::hermitian_eigenvalues(a);
  double target = s.eigenvalues[3];
  auto [lambda, vec] = numerics::inverse_iteration(a, target + 1e-4);
  CHECK(std::abs(lambda - target) <= 1e-9);
  // residual ||A v - lambda v||
  double res = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < 6; ++j) acc += a(i, j) * vec[j];
    acc -= lambda * vec[i];
    res += std::norm(acc);
  }
  CHECK(std::sqrt(res) <= 1e-8);
}

TEST_CASE("tridiagonal inverse iteration recovers the sine mode") {
  const std::size_t n = 40;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  double exact = 2.0 - 2.0 * std::cos(3.0 * M_PI / double(n + 1));
  auto [lambda, vec] = numerics::tridiagonal_inverse_iteration(d, e, exact + 1e-5);
  CHECK(std::abs(lambda - exact) <= 1e-10);
  double corr = 0.0, nv = 0.0, ns = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::sin(3.0 * M_PI * double(i + 1) / double(n + 1));
    corr += s * vec[i];
    nv += vec[i] * vec[i];
    ns += s * s;
  }
  CHECK(std::abs(corr) / std::sqrt(nv * ns) >= 1.0 - 1e-9);
}

TEST_CASE("polynomial roots: golden quadratic and a factored cubic") {
  auto r1 = numerics::polynomial_roots({-1.0, -1.0, 1.0});  // x^2 - x - 1
  REQUIRE(r1.size() == 2);
  std::sort(r1.begin(), r1.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  double phi = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(std::abs(r1[1] - Complex(phi, 0.0)) <= 1e-9);
  CHECK(std::abs(r1[0] - Complex(1.0 - phi, 0.0)) <= 1e-9);

  auto r2 = numerics::polynomial_roots({-6.0, 11.0, -6.0, 1.0});  // (x-1)(x-2)(x-3)
  REQUIRE(r2.size() == 3);
  std::sort(r2.begin(), r2.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  CHECK(std::abs(r2[0] - Complex(1.0, 0.0)) <= 1e-9);
  CHECK(std::abs(r2[1] - Complex(2.0, 0.0)) <= 1e-9);
  CHECK(std::abs(r2[2] - Complex(3.0, 0.0)) <= 1e-9);
}

namespace {

// Random banded Hermitian matrix together with its dense copy.
std::pair<numerics::BandedHermitian, HermitianMatrix> random_banded(std::size_t n,
                                                                    std::size_t b,
                                                                    std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  numerics::BandedHermitian banded(n, b);
  HermitianMatrix dense(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex d(u(rng), 0.0);
    banded.set(i, i, d);
    dense(i, i) = d;
    for (std::size_t j = i + 1; j < std::min(n, i + b + 1); ++j) {
      Complex v(u(rng), u(rng));
      banded.set(i, j, v);
      banded.set(j, i, std::conj(v));
      dense(i, j) = v;
      dense(j, i) = std::conj(v);
    }
  }
  return {std::move(banded), std::move(dense)};
}

}  // namespace

TEST_CASE("banded storage rejects writes outside the band and reads them as zero") {
  numerics::BandedHermitian a(6, 2);
  a.set(1, 3, Complex(0.5, -0.25));
  CHECK(a.get(1, 3) == Complex(0.5, -0.25));
  CHECK(a.get(0, 4) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(a.set(0, 4, Complex(1.0, 0.0)), qpspec::Error);
  CHECK_THROWS_AS(numerics::BandedHermitian(0, 2), qpspec::Error);
}

TEST_CASE("banded apply matches the dense product") {
  auto [banded, dense] = random_banded(40, 3, 911);
  CHECK(banded.max_asymmetry() == 0.0);
  std::vector<Complex> x(40);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = Complex(std::sin(0.3 * double(i)), std::cos(0.9 * double(i)));
  auto y = banded.apply(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += dense(i, j) * x[j];
    CHECK(std::abs(y[i] - acc) <= 1e-13);
  }
  CHECK_THROWS_AS(banded.apply(std::vector<Complex>(7)), qpspec::Error);
}

TEST_CASE("banded inverse iteration agrees with the dense eigensolver") {
  auto [banded, dense] = random_banded(60, 4, 2024);
  auto spectrum = numerics::hermitian_eigenvalues(dense).eigenvalues;
  for (std::size_t pick : {std::size_t(0), std::size_t(29), std::size_t(59)}) {
    double target = spectrum[pick];
    auto [lambda, vec] = numerics::banded_inverse_iteration(banded, target + 2e-5);
    CHECK(std::abs(lambda - target) <= 1e-9);
    auto av = banded.apply(vec);
    double res = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) res += std::norm(av[i] - lambda * vec[i]);
    CHECK(std::sqrt(res) <= 1e-8);
  }
}

TEST_CASE("banded inverse iteration survives a shift exactly at an eigenvalue") {
  auto [banded, dense] = random_banded(30, 2, 5150);
  auto spectrum = numerics::hermitian_eigenvalues(dense).eigenvalues;
  auto [lambda, vec] = numerics::banded_inverse_iteration(banded, spectrum[10]);
  CHECK(std::abs(lambda - spectrum[10]) <= 1e-10);
  auto av = banded.apply(vec);
  double res = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) res += std::norm(av[i] - lambda * vec[i]);
  CHECK(std::sqrt(res) <= 1e-9);
}
