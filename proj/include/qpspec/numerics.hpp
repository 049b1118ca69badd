#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qpspec/error.hpp"

namespace qpspec::numerics {

using Complex = std::complex<double>;

// Dense Hermitian matrix, row-major, full storage (both triangles kept
// coherent by the assembly code).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n) : n_(n), a_(n * n, Complex(0.0, 0.0)) {}

  std::size_t size() const { return n_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  // Largest |a(i,j) - conj(a(j,i))| over the matrix.
  double max_asymmetry() const;
  bool is_hermitian(double tol = 1e-12) const { return max_asymmetry() <= tol; }
  // True when every imaginary part is exactly zero (enables the cheaper
  // real-symmetric reduction).
  bool is_real() const;

  std::vector<Complex>& data() { return a_; }
  const std::vector<Complex>& data() const { return a_; }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

// Hermitian matrix whose entries vanish outside |i - j| <= bandwidth,
// stored by diagonals so shifted solves stay O(n * bandwidth^2). Built for
// the large sparse assemblies where a full dense solve is out of reach and
// only a few targeted eigenpairs are wanted.
class BandedHermitian {
 public:
  BandedHermitian() = default;
  BandedHermitian(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return b_; }

  // Reads outside the band return 0; writes outside it throw InvalidArgument.
  Complex get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Complex v);

  std::vector<Complex> apply(const std::vector<Complex>& x) const;

  // Largest |a(i,j) - conj(a(j,i))| over the stored band.
  double max_asymmetry() const;

 private:
  std::size_t n_ = 0;
  std::size_t b_ = 0;
  // diag_[(i - j + b) * n + j] holds a(i, j).
  std::vector<Complex> diag_;
};

// Finite sample of a spectrum, sorted ascending.
struct SpectrumSample {
  std::vector<double> eigenvalues;
};

struct EnvelopeFit {
  double rate = 0.0;       // slope of log|amplitude| against position
  double intercept = 0.0;  // value of the log-linear fit at position 0
};

// All eigenvalues of a Hermitian matrix (Householder reduction to real
// tridiagonal form followed by implicit-shift QL). `parallel` toggles the
// OpenMP row loops; results are identical either way.
SpectrumSample hermitian_eigenvalues(const HermitianMatrix& a, bool parallel = true);

// Generalized pencil a x = lambda diag(b) x with positive diagonal weight,
// reduced symmetrically via diag(b)^{-1/2}.
SpectrumSample generalized_hermitian_eigenvalues(const HermitianMatrix& a,
                                                 const std::vector<double>& b_diag,
                                                 bool parallel = true);

// Generalized pencil with a full Hermitian positive-definite weight matrix,
// reduced through its Cholesky factor. Throws IndefiniteWeight when the
// factorization meets a non-positive pivot.
SpectrumSample generalized_hermitian_eigenvalues(const HermitianMatrix& a,
                                                 const HermitianMatrix& b,
                                                 bool parallel = true);

// Hausdorff distance between two finite real sets after clipping both to
// [window_lo, window_hi]. Throws EmptyAfterWindow when a side becomes empty.
double hausdorff_distance(const std::vector<double>& set_a,
                          const std::vector<double>& set_b,
                          double window_lo, double window_hi);

// Fits log|amplitude| ~ rate * position + intercept. The fit runs on the
// envelope (points whose |amplitude| is maximal within a 5-sample window);
// when fewer than three envelope points exist the signal is treated as
// non-oscillatory and every positive-amplitude sample is used.
EnvelopeFit fit_exponential_envelope(const std::vector<std::pair<double, double>>& samples);

// Eigenvalues of a real symmetric tridiagonal matrix, ascending. `e` holds
// the n-1 off-diagonal entries. This is the QL kernel the dense solvers
// reduce to; the 1D interface solver uses it directly.
std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> d,
                                                      std::vector<double> e);

// One eigenpair of a dense Hermitian matrix by inverse iteration around
// `shift`. Returns the Rayleigh-quotient eigenvalue and a unit eigenvector.
std::pair<double, std::vector<Complex>> inverse_iteration(const HermitianMatrix& a,
                                                          double shift);

// Inverse iteration on a banded Hermitian matrix through a banded LU with
// partial pivoting (fill limited to one extra band of superdiagonals).
// Semantics match the dense overload: the eigenpair nearest `shift`.
std::pair<double, std::vector<Complex>> banded_inverse_iteration(
    const BandedHermitian& a, double shift);

// Inverse iteration specialized to a real symmetric tridiagonal matrix.
std::pair<double, std::vector<double>> tridiagonal_inverse_iteration(
    const std::vector<double>& d, const std::vector<double>& e, double shift);

// Complex roots of a real-coefficient polynomial c[0] + c[1] x + ... + c[n] x^n
// by Durand-Kerner iteration. Intended for the small characteristic
// polynomials that show up in substitution-matrix analysis.
std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs);

namespace detail {

// Householder reduction of a Hermitian (or real symmetric) matrix to real
// tridiagonal form. Destroys `a`. The row loops run under OpenMP when
// `parallel` is set; per-row arithmetic is unchanged, so serial and parallel
// runs produce bitwise-identical output.
void householder_tridiagonalize(std::vector<Complex>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e,
                                bool parallel);
void householder_tridiagonalize(std::vector<double>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e,
                                bool parallel);

}  // namespace detail

}  // namespace qpspec::numerics
