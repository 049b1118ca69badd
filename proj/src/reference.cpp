#include "qpspec/reference.hpp"

#include <algorithm>
#include <cmath>

namespace qpspec::reference {

using numerics::Complex;
using numerics::HermitianMatrix;
using numerics::SpectrumSample;

// Cyclic Jacobi with complex plane rotations. Each (p, q) step applies the
// unitary that diagonalizes the 2x2 principal submatrix:
//   J(p,p) = c, J(q,q) = c, J(p,q) = s e^{i phi}, J(q,p) = -s e^{-i phi}
// with phi = arg(a_pq) and (c, s) the usual symmetric-Jacobi pair.
SpectrumSample hermitian_eigenvalues_jacobi(HermitianMatrix a, int max_sweeps, double tol) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::DimensionZero, "matrix has dimension zero");
  if (!a.is_hermitian(1e-12))
    fail(ErrorCode::NonHermitianInput, "input is not Hermitian");

  double fro = 0.0;
  for (const Complex& v : a.data()) fro += std::norm(v);
  fro = std::sqrt(fro);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * std::max(1.0, fro);
       ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double rpq = std::abs(apq);
        if (rpq < 1e-300) continue;
        const Complex eiphi = apq / rpq;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * rpq);
        const double t = zeta == 0.0
                             ? 1.0
                             : std::copysign(1.0, zeta) /
                                   (std::fabs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Complex arp = a(r, p);
          const Complex arq = a(r, q);
          const Complex new_rp = arp * c - arq * (s * std::conj(eiphi));
          const Complex new_rq = arp * (s * eiphi) + arq * c;
          a(r, p) = new_rp;
          a(p, r) = std::conj(new_rp);
          a(r, q) = new_rq;
          a(q, r) = std::conj(new_rq);
        }
        const double napp = app * c * c - 2.0 * rpq * s * c + aqq * s * s;
        const double naqq = app * s * s + 2.0 * rpq * s * c + aqq * c * c;
        a(p, p) = napp;
        a(q, q) = naqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  SpectrumSample out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i).real();
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

}  // namespace qpspec::reference
