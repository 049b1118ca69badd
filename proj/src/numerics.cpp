#include "qpspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace qpspec::numerics {

namespace {

inline double conj_val(double x) { return x; }
inline Complex conj_val(const Complex& x) { return std::conj(x); }
inline double abs2(double x) { return x * x; }
inline double abs2(const Complex& x) { return std::norm(x); }
inline double real_part(double x) { return x; }
inline double real_part(const Complex& x) { return x.real(); }

// Householder reduction to real tridiagonal form, shared between the real
// symmetric and complex Hermitian paths. Works on the full square storage;
// after step k the trailing block rows k+1..n-1 hold the reduced matrix.
// Row loops are the hot O(n^2) part and carry the OpenMP pragmas; all
// reductions stay serial so results do not depend on the thread count.
template <typename T>
void householder_impl(std::vector<T>& a, std::size_t n, std::vector<double>& d,
                      std::vector<double>& e, bool parallel) {
  d.assign(n, 0.0);
  e.assign(n >= 1 ? n - 1 : 0, 0.0);
  if (n == 0) return;
  if (n == 1) {
    d[0] = real_part(a[0]);
    return;
  }
  std::vector<T> v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    const std::size_t base = k + 1;
    double sig2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) sig2 += abs2(a[(base + i) * n + k]);
    if (sig2 == 0.0) {
      e[k] = 0.0;
      continue;
    }
    const T a0 = a[base * n + k];
    const double sigma = std::sqrt(sig2);
    const double absa0 = std::sqrt(abs2(a0));
    const T phase = absa0 > 0.0 ? T(a0 / absa0) : T(1.0);
    const T alpha = -phase * sigma;  // value the subdiagonal entry reflects to
    for (std::size_t i = 0; i < m; ++i) v[i] = a[(base + i) * n + k];
    v[0] -= alpha;
    const double tau = 1.0 / (sigma * (sigma + absa0));  // 2 / ||v||^2

    // w = tau * B v over the trailing block
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
      const T* row = &a[(base + ii) * n + base];
      T acc = T(0.0);
      for (std::size_t j = 0; j < m; ++j) acc += row[j] * v[j];
      w[ii] = tau * acc;
    }

    double beta = 0.0;  // (tau/2) v^H w, real by Hermiticity
    for (std::size_t i = 0; i < m; ++i) beta += real_part(conj_val(v[i]) * w[i]);
    beta *= 0.5 * tau;
    for (std::size_t i = 0; i < m; ++i) w[i] -= beta * v[i];

    // rank-2 update B -= v w^H + w v^H
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
      T* row = &a[(base + ii) * n + base];
      const T vi = v[ii];
      const T wi = w[ii];
      for (std::size_t j = 0; j < m; ++j)
        row[j] -= vi * conj_val(w[j]) + wi * conj_val(v[j]);
    }
    e[k] = sigma;  // |alpha|; phases are absorbed by a diagonal similarity
  }
  e[n - 2] = std::sqrt(abs2(a[(n - 1) * n + (n - 2)]));
  for (std::size_t i = 0; i < n; ++i) d[i] = real_part(a[i * n + i]);
}

// Implicit-shift QL on a real symmetric tridiagonal matrix. d is the
// diagonal, e the off-diagonal padded to length n (e[n-1] unused). Eigenvalues
// replace d. Off-diagonals count as negligible below 1e-14 times the local
// diagonal scale; each eigenvalue gets at most 50 sweeps.
void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double scale = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-14 * scale) break;
      }
      if (m != l) {
        if (++iter > 50)
          fail(ErrorCode::IterationLimit,
               "QL failed to converge within 50 sweeps at index " + std::to_string(l));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool split = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            split = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (split) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

std::vector<double> solve_tridiagonal_form(std::vector<double> d, std::vector<double> e) {
  ql_implicit_shift(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

double HermitianMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      worst = std::max(worst, std::abs(a_[i * n_ + j] - std::conj(a_[j * n_ + i])));
  return worst;
}

bool HermitianMatrix::is_real() const {
  for (const Complex& v : a_)
    if (v.imag() != 0.0) return false;
  return true;
}

namespace detail {

void householder_tridiagonalize(std::vector<Complex>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e,
                                bool parallel) {
  householder_impl(a, n, d, e, parallel);
}

void householder_tridiagonalize(std::vector<double>& a, std::size_t n,
                                std::vector<double>& d, std::vector<double>& e,
                                bool parallel) {
  householder_impl(a, n, d, e, parallel);
}

}  // namespace detail

SpectrumSample hermitian_eigenvalues(const HermitianMatrix& a, bool parallel) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (!a.is_hermitian(1e-12))
    fail(ErrorCode::NonHermitianInput,
         "max asymmetry " + std::to_string(a.max_asymmetry()) + " exceeds 1e-12");
  std::vector<double> d, e;
  if (a.is_real()) {
    std::vector<double> ar(n * n);
    const auto& src = a.data();
    for (std::size_t i = 0; i < n * n; ++i) ar[i] = src[i].real();
    detail::householder_tridiagonalize(ar, n, d, e, parallel);
  } else {
    std::vector<Complex> ac = a.data();
    detail::householder_tridiagonalize(ac, n, d, e, parallel);
  }
  SpectrumSample s;
  s.eigenvalues = solve_tridiagonal_form(std::move(d), std::move(e));
  return s;
}

SpectrumSample generalized_hermitian_eigenvalues(const HermitianMatrix& a,
                                                 const std::vector<double>& b_diag,
                                                 bool parallel) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (b_diag.size() != n)
    fail(ErrorCode::InvalidArgument, "weight length does not match matrix dimension");
  for (double b : b_diag)
    if (!(b > 0.0) || !std::isfinite(b))
      fail(ErrorCode::NonPositiveWeight, "diagonal weight must be positive and finite");
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(b_diag[i]);
  HermitianMatrix t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = a(i, j) * (inv_sqrt[i] * inv_sqrt[j]);
  return hermitian_eigenvalues(t, parallel);
}

SpectrumSample generalized_hermitian_eigenvalues(const HermitianMatrix& a,
                                                 const HermitianMatrix& b,
                                                 bool parallel) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (b.size() != n)
    fail(ErrorCode::InvalidArgument, "weight matrix dimension mismatch");
  if (!b.is_hermitian(1e-12))
    fail(ErrorCode::IndefiniteWeight, "weight matrix is not Hermitian");

  // Cholesky b = L L^H (lower triangle of `l` becomes L).
  std::vector<Complex> l = b.data();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = l[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l[j * n + k]);
    if (!(diag > 0.0) || !std::isfinite(diag))
      fail(ErrorCode::IndefiniteWeight,
           "weight matrix is not positive definite (pivot " + std::to_string(j) + ")");
    const double dj = std::sqrt(diag);
    l[j * n + j] = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = l[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * std::conj(l[j * n + k]);
      l[i * n + j] = s / dj;
    }
  }

  auto forward_solve_columns = [&](std::vector<Complex>& y) {
    // solves L Y = Y in place, column by column
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        Complex s = y[i * n + c];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k * n + c];
        y[i * n + c] = s / l[i * n + i];
      }
  };

  std::vector<Complex> y = a.data();
  forward_solve_columns(y);  // Y = L^{-1} A
  std::vector<Complex> z(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z[i * n + j] = std::conj(y[j * n + i]);
  forward_solve_columns(z);  // Z = L^{-1} Y^H, so  L^{-1} A L^{-H} = Z^H

  HermitianMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = Complex(std::conj(z[i * n + i]).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v = 0.5 * (std::conj(z[j * n + i]) + z[i * n + j]);
      c(i, j) = v;
      c(j, i) = std::conj(v);
    }
  }
  return hermitian_eigenvalues(c, parallel);
}

double hausdorff_distance(const std::vector<double>& set_a,
                          const std::vector<double>& set_b,
                          double window_lo, double window_hi) {
  if (!(window_lo <= window_hi))
    fail(ErrorCode::InvalidArgument, "window must satisfy lo <= hi");
  auto clip = [&](const std::vector<double>& v) {
    std::vector<double> r;
    for (double x : v)
      if (x >= window_lo && x <= window_hi) r.push_back(x);
    std::sort(r.begin(), r.end());
    return r;
  };
  const std::vector<double> a = clip(set_a);
  const std::vector<double> b = clip(set_b);
  if (a.empty() || b.empty())
    fail(ErrorCode::EmptyAfterWindow, "a set is empty after windowing");
  auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, *it - x);
      if (it != to.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

EnvelopeFit fit_exponential_envelope(const std::vector<std::pair<double, double>>& samples) {
  std::vector<std::pair<double, double>> s = samples;
  std::stable_sort(s.begin(), s.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  const std::size_t n = s.size();
  std::vector<double> mag(n);
  std::size_t positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::fabs(s[i].second);
    if (mag[i] > 0.0) ++positive;
  }
  if (positive < 3)
    fail(ErrorCode::InsufficientSamples,
         "need at least 3 samples with non-zero amplitude, have " +
             std::to_string(positive));

  // Envelope: samples maximal within the centered 5-sample window. A signal
  // with fewer than three such crests is treated as non-oscillatory and every
  // positive sample participates in the fit.
  std::vector<std::size_t> pick;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mag[i] > 0.0)) continue;
    const std::size_t jlo = i >= 2 ? i - 2 : 0;
    const std::size_t jhi = std::min(n - 1, i + 2);
    bool is_max = true;
    for (std::size_t j = jlo; j <= jhi; ++j)
      if (mag[j] > mag[i]) {
        is_max = false;
        break;
      }
    if (is_max) pick.push_back(i);
  }
  if (pick.size() < 3) {
    pick.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mag[i] > 0.0) pick.push_back(i);
  }

  const double m = static_cast<double>(pick.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, xmax = 0.0;
  for (std::size_t idx : pick) {
    const double x = s[idx].first;
    const double y = std::log(mag[idx]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    xmax = std::max(xmax, std::fabs(x));
  }
  const double denom = m * sxx - sx * sx;
  if (!(denom > 1e-12 * m * m * (1.0 + xmax * xmax)))
    fail(ErrorCode::DegenerateFit, "sample positions do not span an interval");
  EnvelopeFit fit;
  fit.rate = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.rate * sx) / m;
  return fit;
}

std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> d,
                                                      std::vector<double> e) {
  if (d.empty()) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (e.size() + 1 != d.size())
    fail(ErrorCode::InvalidArgument, "off-diagonal must have length n-1");
  return solve_tridiagonal_form(std::move(d), std::move(e));
}

namespace {

// Dense complex LU with partial pivoting; zero pivots are nudged so the
// factorization stays usable for inverse iteration at an exact eigenvalue.
struct DenseLU {
  std::vector<Complex> lu;
  std::vector<std::size_t> piv;
  std::size_t n = 0;

  void factor(std::vector<Complex> a, std::size_t dim, double scale) {
    n = dim;
    lu = std::move(a);
    piv.resize(n);
    const double tiny = 1e-40 * (scale + 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu[i * n + k]) > std::abs(lu[p * n + k])) p = i;
      piv[k] = p;
      if (p != k)
        for (std::size_t j = 0; j < n; ++j) std::swap(lu[p * n + j], lu[k * n + j]);
      if (std::abs(lu[k * n + k]) < tiny) lu[k * n + k] = Complex(tiny, 0.0);
      const Complex inv = 1.0 / lu[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const Complex f = lu[i * n + k] * inv;
        lu[i * n + k] = f;
        for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
      }
    }
  }

  void solve(std::vector<Complex>& x) const {
    // The multipliers are stored in fully pivoted row order, so the whole
    // permutation must be applied to the right-hand side before elimination.
    for (std::size_t k = 0; k < n; ++k)
      if (piv[k] != k) std::swap(x[piv[k]], x[k]);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu[i * n + k] * x[k];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu[i * n + j] * x[j];
      x[i] /= lu[i * n + i];
    }
  }
};

}  // namespace

std::pair<double, std::vector<Complex>> inverse_iteration(const HermitianMatrix& a,
                                                          double shift) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  double scale = std::fabs(shift);
  for (const Complex& v : a.data()) scale = std::max(scale, std::abs(v));

  std::vector<Complex> shifted = a.data();
  for (std::size_t i = 0; i < n; ++i) shifted[i * n + i] -= shift;
  DenseLU lu;
  lu.factor(std::move(shifted), n, scale);

  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = Complex(std::cos(0.7 * double(i) + 0.3), std::sin(1.3 * double(i) + 0.7));
  auto normalize = [&](std::vector<Complex>& v) {
    double nrm = 0.0;
    for (const Complex& c : v) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    for (Complex& c : v) c /= nrm;
  };
  normalize(x);

  // Rayleigh quotient and residual ||A v - lambda v|| in one pass.
  auto rayleigh_residual = [&](const std::vector<Complex>& v) {
    std::vector<Complex> av(n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += a(i, j) * v[j];
      av[i] = row;
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(v[i]) * av[i];
    const double lam = acc.real();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(av[i] - lam * v[i]);
    return std::make_pair(lam, std::sqrt(res));
  };

  double lambda = shift;
  for (int it = 0; it < 40; ++it) {
    lu.solve(x);
    normalize(x);
    const auto [lam, res] = rayleigh_residual(x);
    lambda = lam;
    if (res <= 1e-12 * (scale * double(n) + std::fabs(lam))) break;
  }
  return {lambda, x};
}

BandedHermitian::BandedHermitian(std::size_t n, std::size_t bandwidth)
    : n_(n), b_(bandwidth), diag_((2 * bandwidth + 1) * n, Complex(0.0, 0.0)) {
  if (n == 0) fail(ErrorCode::DimensionZero, "banded matrix has dimension zero");
}

Complex BandedHermitian::get(std::size_t i, std::size_t j) const {
  const std::size_t dist = i > j ? i - j : j - i;
  if (dist > b_) return Complex(0.0, 0.0);
  return diag_[(i + b_ - j) * n_ + j];
}

void BandedHermitian::set(std::size_t i, std::size_t j, Complex v) {
  const std::size_t dist = i > j ? i - j : j - i;
  if (i >= n_ || j >= n_ || dist > b_)
    fail(ErrorCode::InvalidArgument, "banded write outside the stored band");
  diag_[(i + b_ - j) * n_ + j] = v;
}

std::vector<Complex> BandedHermitian::apply(const std::vector<Complex>& x) const {
  if (x.size() != n_)
    fail(ErrorCode::InvalidArgument, "vector length does not match matrix size");
  std::vector<Complex> y(n_, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j_lo = i > b_ ? i - b_ : 0;
    const std::size_t j_hi = std::min(n_ - 1, i + b_);
    Complex acc(0.0, 0.0);
    for (std::size_t j = j_lo; j <= j_hi; ++j) acc += diag_[(i + b_ - j) * n_ + j] * x[j];
    y[i] = acc;
  }
  return y;
}

double BandedHermitian::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j_hi = std::min(n_ - 1, i + b_);
    for (std::size_t j = i; j <= j_hi; ++j)
      worst = std::max(worst, std::abs(get(i, j) - std::conj(get(j, i))));
  }
  return worst;
}

namespace {

// LU of a shifted banded matrix with partial pivoting. Row interchanges
// widen U to kl + ku superdiagonals, so the band store keeps kl extra rows
// of fill (LAPACK band layout). Multiplier columns are not retro-swapped;
// the solve interleaves the permutation exactly as the factorization did.
struct BandedLU {
  std::size_t n = 0, kl = 0, ku = 0;
  std::vector<Complex> ab;
  std::vector<std::size_t> piv;

  Complex& at(std::size_t i, std::size_t j) { return ab[(i + ku - j) * n + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return ab[(i + ku - j) * n + j]; }

  void factor(const BandedHermitian& a, double shift, double scale) {
    n = a.size();
    const std::size_t b = a.bandwidth();
    kl = b;
    ku = 2 * b;
    ab.assign((kl + ku + 1) * n, Complex(0.0, 0.0));
    piv.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i_lo = j > b ? j - b : 0;
      const std::size_t i_hi = std::min(n - 1, j + b);
      for (std::size_t i = i_lo; i <= i_hi; ++i) at(i, j) = a.get(i, j);
      at(j, j) -= shift;
    }
    const double tiny = 1e-40 * (scale + 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i_max = std::min(n - 1, k + kl);
      const std::size_t j_max = std::min(n - 1, k + ku);
      std::size_t p = k;
      for (std::size_t i = k + 1; i <= i_max; ++i)
        if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
      piv[k] = p;
      if (p != k)
        for (std::size_t j = k; j <= j_max; ++j) std::swap(at(p, j), at(k, j));
      if (std::abs(at(k, k)) < tiny) at(k, k) = Complex(tiny, 0.0);
      const Complex inv = 1.0 / at(k, k);
      for (std::size_t i = k + 1; i <= i_max; ++i) {
        const Complex f = at(i, k) * inv;
        at(i, k) = f;
        for (std::size_t j = k + 1; j <= j_max; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  void solve(std::vector<Complex>& x) const {
    for (std::size_t k = 0; k < n; ++k) {
      if (piv[k] != k) std::swap(x[piv[k]], x[k]);
      const std::size_t i_max = std::min(n - 1, k + kl);
      for (std::size_t i = k + 1; i <= i_max; ++i) x[i] -= at(i, k) * x[k];
    }
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t j_max = std::min(n - 1, i + ku);
      for (std::size_t j = i + 1; j <= j_max; ++j) x[i] -= at(i, j) * x[j];
      x[i] /= at(i, i);
    }
  }
};

}  // namespace

std::pair<double, std::vector<Complex>> banded_inverse_iteration(
    const BandedHermitian& a, double shift) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  const std::size_t b = a.bandwidth();
  double scale = std::fabs(shift);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j_hi = std::min(n - 1, i + b);
    for (std::size_t j = i; j <= j_hi; ++j) scale = std::max(scale, std::abs(a.get(i, j)));
  }

  BandedLU lu;
  lu.factor(a, shift, scale);

  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = Complex(std::cos(0.7 * double(i) + 0.3), std::sin(1.3 * double(i) + 0.7));
  auto normalize = [&](std::vector<Complex>& v) {
    double nrm = 0.0;
    for (const Complex& c : v) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    for (Complex& c : v) c /= nrm;
  };
  normalize(x);

  auto rayleigh_residual = [&](const std::vector<Complex>& v) {
    const std::vector<Complex> av = a.apply(v);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(v[i]) * av[i];
    const double lam = acc.real();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(av[i] - lam * v[i]);
    return std::make_pair(lam, std::sqrt(res));
  };

  double lambda = shift;
  for (int it = 0; it < 40; ++it) {
    lu.solve(x);
    normalize(x);
    const auto [lam, res] = rayleigh_residual(x);
    lambda = lam;
    // Row sums bound the norm much tighter than n * scale does here.
    if (res <= 1e-12 * (scale * double(2 * b + 1) + std::fabs(lam))) break;
  }
  return {lambda, x};
}

std::pair<double, std::vector<double>> tridiagonal_inverse_iteration(
    const std::vector<double>& d, const std::vector<double>& e, double shift) {
  const std::size_t n = d.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (e.size() + 1 != n)
    fail(ErrorCode::InvalidArgument, "off-diagonal must have length n-1");

  // LU of (T - shift I) with row swaps between neighbours. p/q/r hold the
  // pivot row's three relevant columns, mult the elimination multiplier.
  std::vector<double> p(n), q(n, 0.0), r(n, 0.0), mult(n, 0.0);
  std::vector<char> swapped(n, 0);
  double scale = std::fabs(shift);
  for (double x : d) scale = std::max(scale, std::fabs(x));
  for (double x : e) scale = std::max(scale, std::fabs(x));
  const double tiny = 1e-40 * (scale + 1e-300);

  {
    double pk = d[0] - shift;
    double qk = n > 1 ? e[0] : 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double sub = e[k];
      const double dnext = d[k + 1] - shift;
      const double enext = k + 2 < n ? e[k + 1] : 0.0;
      if (std::fabs(pk) >= std::fabs(sub)) {
        swapped[k] = 0;
        double piv = pk;
        if (std::fabs(piv) < tiny) piv = piv < 0 ? -tiny : tiny;
        const double mlt = sub / piv;
        p[k] = piv;
        q[k] = qk;
        r[k] = 0.0;
        mult[k] = mlt;
        pk = dnext - mlt * qk;
        qk = enext;
      } else {
        swapped[k] = 1;  // pivot row comes from below
        const double mlt = pk / sub;
        p[k] = sub;
        q[k] = dnext;
        r[k] = enext;
        mult[k] = mlt;
        pk = qk - mlt * dnext;
        qk = -mlt * enext;
      }
    }
    if (std::fabs(pk) < tiny) pk = pk < 0 ? -tiny : tiny;
    p[n - 1] = pk;
    q[n - 1] = 0.0;
    r[n - 1] = 0.0;
  }

  auto solve = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(x[k], x[k + 1]);
      x[k + 1] -= mult[k] * x[k];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      if (i + 1 < n) s -= q[i] * x[i + 1];
      if (i + 2 < n) s -= r[i] * x[i + 2];
      x[i] = s / p[i];
    }
  };

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(0.7 * double(i) + 0.3);
  auto normalize = [&](std::vector<double>& v) {
    double nrm = 0.0;
    for (double c : v) nrm += c * c;
    nrm = std::sqrt(nrm);
    for (double& c : v) c /= nrm;
  };
  normalize(x);

  auto rayleigh_residual = [&](const std::vector<double>& v) {
    std::vector<double> tv(n);
    for (std::size_t i = 0; i < n; ++i) {
      double row = d[i] * v[i];
      if (i > 0) row += e[i - 1] * v[i - 1];
      if (i + 1 < n) row += e[i] * v[i + 1];
      tv[i] = row;
    }
    double lam = 0.0;
    for (std::size_t i = 0; i < n; ++i) lam += v[i] * tv[i];
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = tv[i] - lam * v[i];
      res += diff * diff;
    }
    return std::make_pair(lam, std::sqrt(res));
  };

  double lambda = shift;
  for (int it = 0; it < 40; ++it) {
    solve(x);
    normalize(x);
    const auto [lam, res] = rayleigh_residual(x);
    lambda = lam;
    if (res <= 1e-12 * (scale * 3.0 + std::fabs(lam))) break;
  }
  return {lambda, x};
}

std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) return {};
  const std::size_t deg = c.size() - 1;
  const double lead = c.back();

  auto eval = [&](Complex x) {
    Complex r = c.back();
    for (std::size_t k = deg; k-- > 0;) r = r * x + c[k];
    return r;
  };

  std::vector<Complex> z(deg), nz(deg);
  Complex acc(1.0, 0.0);
  const Complex seed(0.4, 0.9);
  for (std::size_t i = 0; i < deg; ++i) {
    acc *= seed;
    z[i] = acc;
  }
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      Complex denom = lead;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      const Complex delta = eval(z[i]) / denom;
      nz[i] = z[i] - delta;
      moved = std::max(moved, std::abs(delta));
      spread = std::max(spread, std::abs(nz[i]));
    }
    z = nz;
    if (moved <= 1e-14 * (1.0 + spread)) break;
  }
  return z;
}

}  // namespace qpspec::numerics
