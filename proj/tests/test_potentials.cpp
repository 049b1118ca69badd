#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qpspec/contfrac.hpp"
#include "qpspec/error.hpp"
#include "qpspec/potentials.hpp"
#include "qpspec/tiling.hpp"

using qpspec::Error;
using qpspec::ErrorCode;
namespace pot = qpspec::potentials;
namespace cf = qpspec::contfrac;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

template <typename F>
std::optional<ErrorCode> thrown_code(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("slice of sin2d vanishes at the origin") {
  const auto f = pot::CoefficientField::preset("sin2d", kGolden);
  CHECK(std::fabs(pot::slice(f, 0.0)) <= 1e-14);
}

TEST_CASE("slice of sin2d at a quarter period") {
  const double theta = 0.7321;
  const auto f = pot::CoefficientField::preset("sin2d", theta);
  CHECK(pot::slice(f, 0.25) == doctest::Approx(1.0 + std::sin(2.0 * kPi * theta / 4.0))
                                   .epsilon(1e-13));
}

TEST_CASE("constant fields slice to the constant") {
  const auto f = pot::CoefficientField::fourier({{0, 0, {2.5, 0.0}}}, kGolden);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 20; ++k) CHECK(pot::slice(f, u(rng)) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("fields are 1-periodic in both torus coordinates") {
  const auto sin2d = pot::CoefficientField::preset("sin2d", kGolden);
  const auto generic = pot::CoefficientField::fourier(
      {{1, 2, {0.3, 0.4}}, {-1, -2, {0.3, -0.4}}, {2, 0, {-0.7, 0.1}}, {-2, 0, {-0.7, -0.1}}},
      kGolden);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double x = u(rng);
    const double y = u(rng);
    for (const auto* f : {&sin2d, &generic}) {
      CHECK(std::fabs((*f)(x + 1.0, y) - (*f)(x, y)) <= 1e-12);
      CHECK(std::fabs((*f)(x, y + 1.0) - (*f)(x, y)) <= 1e-12);
    }
  }
}

TEST_CASE("sin2d matches its trigonometric form and sin2d+3 shifts it") {
  const auto f = pot::CoefficientField::preset("sin2d", kGolden);
  const auto g = pot::CoefficientField::preset("sin2d+3", kGolden);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double x = u(rng);
    const double y = u(rng);
    const double expected = std::sin(2.0 * kPi * x) + std::sin(2.0 * kPi * y);
    CHECK(f(x, y) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(g(x, y) == doctest::Approx(expected + 3.0).epsilon(1e-13));
  }
  CHECK(f.fourier_terms().size() == 4);
  CHECK(g.fourier_terms().size() == 5);
}

TEST_CASE("non-Hermitian Fourier input is rejected") {
  CHECK(thrown_code([] {
          pot::CoefficientField::fourier({{1, 0, {0.5, 0.0}}}, 1.0);
        }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([] {
          pot::CoefficientField::fourier({{1, 0, {0.0, -0.5}}, {-1, 0, {0.0, -0.5}}}, 1.0);
        }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([] { pot::CoefficientField::preset("wavelets", 1.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("slices are 1-periodic in each offset coordinate") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const double y1 = u(rng);
    const double y2 = u(rng);
    const double x = u(rng);
    const auto base = pot::CoefficientField::preset("sin2d", kGolden, {y1, y2});
    const auto shift1 = pot::CoefficientField::preset("sin2d", kGolden, {y1 + 1.0, y2});
    const auto shift2 = pot::CoefficientField::preset("sin2d", kGolden, {y1, y2 + 1.0});
    CHECK(std::fabs(pot::slice(shift1, x) - pot::slice(base, x)) <= 1e-12);
    CHECK(std::fabs(pot::slice(shift2, x) - pot::slice(base, x)) <= 1e-12);
  }
}

TEST_CASE("periodic approximants have period q") {
  const auto f = pot::CoefficientField::preset("sin2d", kGolden);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-8.0, 8.0);

  const auto three_halves = pot::periodic_approximant(f, {3, 2, 2, std::nullopt});
  REQUIRE(three_halves.period.has_value());
  CHECK(*three_halves.period == 2.0);
  CHECK(three_halves.kind == pot::CoefficientKind::Periodic);
  for (int k = 0; k < 50; ++k) {
    const double x = u(rng);
    CHECK(std::fabs(three_halves(x + 2.0) - three_halves(x)) <= 1e-12);
  }

  const auto deep = pot::periodic_approximant(f, {21, 13, 6, std::nullopt});
  REQUIRE(deep.period.has_value());
  CHECK(*deep.period == 13.0);
  for (int k = 0; k < 50; ++k) {
    const double x = u(rng);
    CHECK(std::fabs(deep(x + 13.0) - deep(x)) <= 1e-12);
  }

  const auto constant = pot::CoefficientField::fourier({{0, 0, {1.5, 0.0}}}, kGolden);
  const auto capprox = pot::periodic_approximant(constant, {3, 2, 2, std::nullopt});
  for (int k = 0; k < 20; ++k) CHECK(capprox(u(rng)) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("approximants converge pointwise at the Lipschitz rate") {
  const auto f = pot::CoefficientField::preset("sin2d", kGolden);
  const auto golden_cf = cf::cf_elements("golden", 9);
  const auto conv = cf::convergents(golden_cf, 7);
  const double lipschitz_y = 2.0 * kPi;
  for (int l = 2; l <= 6; ++l) {
    const auto& approx = conv[static_cast<std::size_t>(l)];
    const auto fl = pot::periodic_approximant(f, approx);
    double max_err = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = static_cast<double>(i) / 200.0;
      max_err = std::max(max_err, std::fabs(fl(x) - pot::slice(f, x)));
    }
    CHECK(max_err <= lipschitz_y * std::fabs(kGolden - approx.value()) + 1e-13);
  }
}

TEST_CASE("reflection is exactly even") {
  const auto f = pot::CoefficientField::preset("sin2d", kGolden);
  const auto refl = pot::reflect(pot::slice_coefficient(f));
  CHECK(refl.kind == pot::CoefficientKind::Reflected);
  CHECK_FALSE(refl.period.has_value());
  CHECK(refl(-0.3) == pot::slice(f, 0.3));
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng);
    CHECK(refl(x) == refl(-x));
  }
}

TEST_CASE("reflecting a pure sine gives matching peaks") {
  // theta = 0 turns the slice into sin(2 pi x).
  const auto f = pot::CoefficientField::preset("sin2d", 0.0);
  const auto refl = pot::reflect(pot::slice_coefficient(f));
  CHECK(refl(0.25) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(refl(-0.25) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("even inputs are unchanged by reflection") {
  pot::Coefficient1D even;
  even.kind = pot::CoefficientKind::QuasiperiodicSlice;
  even.evaluator = [](double x) { return std::cos(3.0 * x) + x * x; };
  const auto refl = pot::reflect(even);
  for (int i = -10; i <= 10; ++i) {
    const double x = 0.37 * i;
    CHECK(refl(x) == doctest::Approx(even(x)).epsilon(1e-15));
  }
}

TEST_CASE("single-tile laminate is constant") {
  pot::Laminate lam;
  lam.tiles['a'] = {1.0, 4.0};
  lam.word = {"a", 1};
  const auto c = pot::laminate_coefficient(lam, true);
  CHECK(c.kind == pot::CoefficientKind::Laminate);
  REQUIRE(c.period.has_value());
  CHECK(*c.period == 1.0);
  for (double x : {0.0, 0.5, 0.999, 1.5, -0.25}) CHECK(c(x) == 4.0);
}

TEST_CASE("two-tile laminate is the expected step function") {
  pot::Laminate lam;
  lam.tiles['a'] = {1.0, 1.0};
  lam.tiles['b'] = {1.0, 2.0};
  lam.word = {"ab", 2};
  const auto c = pot::laminate_coefficient(lam, false);
  CHECK(c(0.0) == 1.0);
  CHECK(c(0.99) == 1.0);
  CHECK(c(1.0) == 2.0);
  CHECK(c(1.99) == 2.0);
  // Clamping outside the strip.
  CHECK(c(5.0) == 2.0);
  CHECK(c(-1.0) == 1.0);

  const auto p = pot::laminate_coefficient(lam, true);
  REQUIRE(p.period.has_value());
  CHECK(*p.period == 2.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int k = 0; k < 60; ++k) {
    const double x = u(rng);
    CHECK(p(x + 2.0) == p(x));
  }
}

TEST_CASE("laminate length follows the word length") {
  const auto rule = qpspec::tiling::fibonacci_rule();
  pot::Laminate lam;
  lam.tiles['a'] = {1.0, 1.0};
  lam.tiles['b'] = {1.0, 2.0};
  lam.word = qpspec::tiling::substitute(rule, {"a", 0}, 5);
  const auto c = pot::laminate_coefficient(lam, true);
  REQUIRE(c.period.has_value());
  CHECK(*c.period == static_cast<double>(oracles::fibonacci(7)));
}

TEST_CASE("laminate validation") {
  pot::Laminate empty;
  empty.tiles['a'] = {1.0, 1.0};
  empty.word = {"", 0};
  CHECK(thrown_code([&] { pot::laminate_coefficient(empty, true); }) == ErrorCode::EmptyWord);

  pot::Laminate missing;
  missing.tiles['a'] = {1.0, 1.0};
  missing.word = {"ab", 2};
  CHECK(thrown_code([&] { pot::laminate_coefficient(missing, true); }) ==
        ErrorCode::UnknownLetter);

  pot::Laminate bad;
  bad.tiles['a'] = {0.0, 1.0};
  bad.word = {"a", 1};
  CHECK(thrown_code([&] { pot::laminate_coefficient(bad, true); }) == ErrorCode::InvalidArgument);
}
