#include "qpspec/contfrac.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "qpspec/error.hpp"

namespace qpspec::contfrac {

namespace {

constexpr int kMaxFloatElements = 15;
constexpr double kTerminationThreshold = 1e-12;

// Merge a trailing (..., a, 1) into (..., a+1) so terminated expansions are
// canonical. Truncated prefixes of infinite expansions are left alone.
void canonicalize(std::vector<long long>& e) {
  if (e.size() > 1 && e.back() == 1) {
    e.pop_back();
    e.back() += 1;
  }
}

std::vector<long long> euclid_elements(long long p, long long q, int k_max) {
  if (q <= 0) fail(ErrorCode::InvalidArgument, "rational tag needs a positive denominator");
  std::vector<long long> out;
  // Floor division keeps every element after the first >= 1 for negative p.
  while (q != 0 && static_cast<int>(out.size()) < k_max) {
    long long a = p / q;
    if ((p % q != 0) && ((p < 0) != (q < 0))) a -= 1;
    out.push_back(a);
    long long r = p - a * q;
    p = q;
    q = r;
  }
  if (q == 0) canonicalize(out);
  return out;
}

long long checked_mul_add(long long a, long long b, long long c) {
  long long prod = 0;
  long long sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum))
    fail(ErrorCode::PrecisionExhausted, "approximant overflowed 64-bit integers");
  return sum;
}

}  // namespace

ContinuedFraction cf_elements(double x, int k_max) {
  if (k_max < 1) fail(ErrorCode::InvalidArgument, "k_max must be at least 1");
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "input must be finite");
  std::vector<long long> out;
  double cur = x;
  for (int k = 0; k < k_max; ++k) {
    if (k == kMaxFloatElements)
      fail(ErrorCode::PrecisionExhausted,
           "floating-point expansion is unreliable past 15 elements; use an exact tag");
    const double a = std::floor(cur);
    if (std::fabs(a) >= 9.0e18)
      fail(ErrorCode::InvalidArgument, "element does not fit in 64 bits");
    out.push_back(static_cast<long long>(a));
    const double frac = cur - a;
    if (frac < kTerminationThreshold) {
      canonicalize(out);
      break;
    }
    cur = 1.0 / frac;
  }
  return ContinuedFraction{std::move(out), std::nullopt};
}

ContinuedFraction cf_elements(const std::string& exact_tag, int k_max) {
  if (k_max < 1) fail(ErrorCode::InvalidArgument, "k_max must be at least 1");
  std::vector<long long> out;
  if (exact_tag == "golden") {
    out.assign(static_cast<std::size_t>(k_max), 1);
  } else if (exact_tag == "sqrt2") {
    out.assign(static_cast<std::size_t>(k_max), 2);
    out[0] = 1;
  } else {
    const auto slash = exact_tag.find('/');
    char* end = nullptr;
    const std::string num = exact_tag.substr(0, slash);
    const long long p = std::strtoll(num.c_str(), &end, 10);
    if (end == num.c_str() || *end != '\0')
      fail(ErrorCode::InvalidArgument, "unknown exact tag '" + exact_tag + "'");
    long long q = 1;
    if (slash != std::string::npos) {
      const std::string den = exact_tag.substr(slash + 1);
      q = std::strtoll(den.c_str(), &end, 10);
      if (end == den.c_str() || *end != '\0' || q <= 0)
        fail(ErrorCode::InvalidArgument, "unknown exact tag '" + exact_tag + "'");
    }
    out = euclid_elements(p, q, k_max);
  }
  return ContinuedFraction{std::move(out), exact_tag};
}

std::vector<RationalApproximant> convergents(const ContinuedFraction& cf, int count) {
  if (count < 0) fail(ErrorCode::InvalidArgument, "count must be nonnegative");
  if (static_cast<std::size_t>(count) > cf.elements.size())
    fail(ErrorCode::NotEnoughElements,
         "requested " + std::to_string(count) + " approximants from " +
             std::to_string(cf.elements.size()) + " elements");
  std::vector<RationalApproximant> out;
  out.reserve(static_cast<std::size_t>(count));
  long long p_prev = 1, p_prev2 = 0;
  long long q_prev = 0, q_prev2 = 1;
  for (int k = 0; k < count; ++k) {
    const long long a = cf.elements[static_cast<std::size_t>(k)];
    const long long p = checked_mul_add(a, p_prev, p_prev2);
    const long long q = checked_mul_add(a, q_prev, q_prev2);
    out.push_back(RationalApproximant{p, q, k, std::nullopt});
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;
  }
  for (int k = 0; k + 1 < count; ++k)
    out[static_cast<std::size_t>(k)].error_bound =
        1.0 / (static_cast<double>(out[static_cast<std::size_t>(k)].q) *
               static_cast<double>(out[static_cast<std::size_t>(k) + 1].q));
  if (count >= 1 && static_cast<std::size_t>(count) < cf.elements.size()) {
    const long long q_next =
        checked_mul_add(cf.elements[static_cast<std::size_t>(count)], q_prev, q_prev2);
    out.back().error_bound =
        1.0 / (static_cast<double>(out.back().q) * static_cast<double>(q_next));
  }
  return out;
}

}  // namespace qpspec::contfrac
