#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpspec/contfrac.hpp"
#include "qpspec/potentials.hpp"

namespace qpspec::transfermap {

// 2x2 real monodromy matrix [[a, b], [c, d]] at a fixed spectral parameter.
// The parameter is the frequency omega for laminates and the eigenvalue
// lambda for Schroedinger cells; it is recorded in `omega` either way.
struct TransferMatrix {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  double omega = 0.0;

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
};

// Matrix product lhs * rhs (rhs acts first).
TransferMatrix multiply(const TransferMatrix& lhs, const TransferMatrix& rhs);

// Monodromy of u'' + (omega / c)^2 u = 0 across one tile:
// [[cos kl, sin(kl)/k], [-k sin kl, cos kl]] with k = omega / c, and the
// shear [[1, l], [0, 1]] in the omega -> 0 limit.
TransferMatrix tile_transfer(double length, double wavespeed, double omega);

// Product of tile matrices along the word, leftmost letter applied first:
// the matrix of word w1 w2 is T(w2) T(w1).
TransferMatrix word_transfer(const std::map<char, potentials::Tile>& tiles,
                             const std::string& word, double omega);

struct TraceSequence {
  double omega = 0.0;
  // values[n-1] holds x_n, the trace of the generation-n word matrix.
  std::vector<double> values;
  // Set when the recursion stopped early because two consecutive traces
  // passed 1e100; continuing would overflow to inf - inf.
  bool saturated = false;
};

// x_1, x_2, x_3 from direct products over the words a, ab, aba, then
// x_{n+1} = x_n x_{n-1} - x_{n-2}.
TraceSequence trace_sequence(const std::map<char, potentials::Tile>& tiles, double omega,
                             int n_max);

enum class CertificateCriterion { Theorem, Corollary };

struct SuperBandGapCertificate {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  // Smallest index from which the traces stay beyond 2 in modulus.
  int index_n = 0;
  CertificateCriterion criterion = CertificateCriterion::Theorem;
  // Populated for corollary certificates only.
  double epsilon = 0.0;
};

// Three-condition test |x_N| > 2, |x_{N+1}| >= |x_N|, |x_{N+2}| >= |x_{N+1}|
// at the smallest N, falling back to the two-consecutive-values > 2+epsilon
// test; nullopt when neither fires within the sequence.
std::optional<SuperBandGapCertificate> certify_super_band_gap(const TraceSequence& ts,
                                                              double epsilon);

// Uniform scan of [omega_lo, omega_hi]; certified samples are merged into
// maximal intervals carrying the smallest N valid for every member.
std::vector<SuperBandGapCertificate> scan_super_band_gaps(
    const std::map<char, potentials::Tile>& tiles, double omega_lo, double omega_hi,
    int resolution, double epsilon, int n_max);

// Monodromy of -u'' + V u = lambda u across one period q of the approximant
// potential V(x) = F(x, (p/q) x), integrated by classical Runge-Kutta with
// step h/4 where h = 1/points_per_unit. The determinant is renormalized if
// it drifts beyond 1e-8 from 1.
TransferMatrix period_transfer_schrodinger(const potentials::CoefficientField& field,
                                           const contfrac::RationalApproximant& approx,
                                           double lambda, int points_per_unit);

// Gap decay-rate estimate min_k log|mu_min(k)| / q_k, where mu_min is the
// smaller-modulus eigenvalue of the period-cell matrix and q_k the cell
// length. Fails with NotInGap when some listed cell has |trace| <= 2.
double decay_rate_laminate(const std::map<char, potentials::Tile>& tiles, double omega,
                           const std::vector<int>& generations);

double decay_rate_field(const potentials::CoefficientField& field, double lambda,
                        const std::vector<contfrac::RationalApproximant>& approximants,
                        int points_per_unit);

}  // namespace qpspec::transfermap
