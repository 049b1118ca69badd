#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qpspec::contfrac {

// Canonical continued fraction [a0; a1, a2, ...]. Every element after the
// first is >= 1, and a finite expansion never ends in 1 unless it has length
// 1. When built from an exact tag the elements come from a symbolic
// recurrence and carry no floating-point error.
struct ContinuedFraction {
  std::vector<long long> elements;
  std::optional<std::string> exact_tag;
};

struct RationalApproximant {
  long long p = 0;
  long long q = 1;
  int index = 0;
  // 1/(q_k * q_{k+1}); absent when the next denominator is unknown.
  std::optional<double> error_bound;

  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

// First k_max elements of the continued fraction of x, extracted in floating
// point. Extraction stops early when the fractional part drops below 1e-12
// (the expansion terminated) and refuses to produce more than 15 elements,
// since double precision cannot support deeper expansions.
ContinuedFraction cf_elements(double x, int k_max);

// Exact variant. Recognized tags: "golden" ((1+sqrt(5))/2, all ones),
// "sqrt2" ([1; 2, 2, ...]) and rationals written as "p/q" or a bare integer,
// expanded by the Euclidean algorithm. Exact tags have no depth limit.
ContinuedFraction cf_elements(const std::string& exact_tag, int k_max);

// Rational approximants p_k/q_k for k = 0 .. count-1 via the standard
// recurrence p_k = a_k p_{k-1} + p_{k-2}, q_k = a_k q_{k-1} + q_{k-2}.
// Consecutive approximants satisfy p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1),
// which forces gcd(p_k, q_k) = 1.
std::vector<RationalApproximant> convergents(const ContinuedFraction& cf, int count);

}  // namespace qpspec::contfrac
