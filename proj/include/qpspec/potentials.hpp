#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpspec/contfrac.hpp"
#include "qpspec/tiling.hpp"

namespace qpspec::potentials {

// One term c * exp(2*pi*i*(m x + n y)) of a doubly 1-periodic field.
struct FourierTerm {
  int m = 0;
  int n = 0;
  std::complex<double> c;
};

// Real doubly 1-periodic function F on the 2-torus together with the slope
// theta and torus offset used to cut quasiperiodic slices through it.
class CoefficientField {
 public:
  // Presets: "sin2d" is sin(2 pi x) + sin(2 pi y), "sin2d+3" adds the
  // constant 3 (a positive weight), "zero" is identically 0.
  static CoefficientField preset(const std::string& name, double theta,
                                 std::array<double, 2> offset = {0.0, 0.0});

  // Finite Fourier series; terms must be Hermitian-symmetric (every (m, n)
  // entry paired with the conjugate at (-m, -n)) so the field is real.
  static CoefficientField fourier(const std::vector<FourierTerm>& terms, double theta,
                                  std::array<double, 2> offset = {0.0, 0.0});

  // F at a torus point, before any offset is applied.
  double operator()(double x, double y) const;

  double theta() const { return theta_; }
  const std::array<double, 2>& offset() const { return offset_; }

  // Fourier terms of the raw field, one entry per mode, sorted by (m, n).
  const std::vector<FourierTerm>& fourier_terms() const { return terms_; }

 private:
  CoefficientField() = default;

  std::vector<FourierTerm> terms_;
  double theta_ = 0.0;
  std::array<double, 2> offset_ = {0.0, 0.0};
};

enum class CoefficientKind { QuasiperiodicSlice, Periodic, Reflected, Laminate };

struct Coefficient1D {
  CoefficientKind kind = CoefficientKind::QuasiperiodicSlice;
  std::optional<double> period;
  std::function<double(double)> evaluator;

  double operator()(double x) const { return evaluator(x); }
};

struct Tile {
  double length = 1.0;
  double value = 1.0;
};

struct Laminate {
  std::map<char, Tile> tiles;
  tiling::TilingWord word;
};

// F(x + y1 mod 1, theta x + y2 mod 1).
double slice(const CoefficientField& field, double x);

// The same cut packaged as a coefficient function.
Coefficient1D slice_coefficient(const CoefficientField& field);

// f_l(x) = F(x, (p/q) x): substituting the rational approximant for theta
// makes the slice periodic with period q. The torus offset is always (0, 0)
// for approximants.
Coefficient1D periodic_approximant(const CoefficientField& field,
                                   const contfrac::RationalApproximant& approx);

// x -> c(|x|), the even extension through an artificial mirror at 0.
Coefficient1D reflect(const Coefficient1D& c);

// Piecewise-constant function taking each tile's value on its interval, laid
// left to right from 0. With periodize the pattern repeats with period equal
// to the total length; without it, points outside [0, total) clamp to the
// nearest end tile.
Coefficient1D laminate_coefficient(const Laminate& lam, bool periodize);

}  // namespace qpspec::potentials
