#include "qpspec/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpspec/error.hpp"
#include "qpspec/numerics.hpp"

namespace qpspec::tiling {

namespace {

constexpr long long kWordCap = 10'000'000;

std::size_t letter_index(const SubstitutionRule& rule, char c) {
  const auto it = std::find(rule.alphabet.begin(), rule.alphabet.end(), c);
  if (it == rule.alphabet.end())
    fail(ErrorCode::UnknownLetter, std::string("letter '") + c + "' is not in the alphabet");
  return static_cast<std::size_t>(it - rule.alphabet.begin());
}

void validate_rule(const SubstitutionRule& rule) {
  if (rule.alphabet.empty()) fail(ErrorCode::InvalidArgument, "alphabet is empty");
  for (std::size_t i = 0; i < rule.alphabet.size(); ++i)
    for (std::size_t j = i + 1; j < rule.alphabet.size(); ++j)
      if (rule.alphabet[i] == rule.alphabet[j])
        fail(ErrorCode::InvalidArgument, "alphabet letters must be distinct");
  for (char c : rule.alphabet) {
    const auto it = rule.images.find(c);
    if (it == rule.images.end())
      fail(ErrorCode::InvalidArgument, std::string("no image for letter '") + c + "'");
    if (it->second.empty())
      fail(ErrorCode::InvalidArgument, std::string("image of '") + c + "' is empty");
    for (char img : it->second) letter_index(rule, img);
  }
}

long long checked_mul_add(long long a, long long b, long long c) {
  long long prod = 0;
  long long sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum))
    fail(ErrorCode::PrecisionExhausted, "letter counts overflowed 64-bit integers");
  return sum;
}

std::vector<long long> counts_of(const SubstitutionRule& rule, const std::string& word) {
  std::vector<long long> counts(rule.alphabet.size(), 0);
  for (char c : word) counts[letter_index(rule, c)] += 1;
  return counts;
}

// One application of the matrix from the right: next_j = sum_i cur_i M(i, j).
std::vector<long long> advance_counts(const std::vector<long long>& cur,
                                      const SubstitutionMatrix& m) {
  std::vector<long long> next(cur.size(), 0);
  for (std::size_t i = 0; i < cur.size(); ++i)
    for (std::size_t j = 0; j < cur.size(); ++j)
      next[j] = checked_mul_add(cur[i], m(i, j), next[j]);
  return next;
}

}  // namespace

SubstitutionRule fibonacci_rule() {
  SubstitutionRule rule;
  rule.alphabet = {'a', 'b'};
  rule.images['a'] = "ab";
  rule.images['b'] = "a";
  return rule;
}

TilingWord substitute(const SubstitutionRule& rule, const TilingWord& seed, int steps) {
  if (steps < 0) fail(ErrorCode::InvalidArgument, "steps must be nonnegative");
  validate_rule(rule);
  const SubstitutionMatrix m = substitution_matrix(rule);
  std::vector<long long> counts = counts_of(rule, seed.letters);

  TilingWord out{seed.letters, seed.generation};
  for (int s = 0; s < steps; ++s) {
    counts = advance_counts(counts, m);
    long long next_len = 0;
    for (long long c : counts) next_len = checked_mul_add(1, c, next_len);
    if (next_len > kWordCap)
      fail(ErrorCode::GenerationTooLarge,
           "word would have " + std::to_string(next_len) +
               " letters; track counts via letter_counts instead");
    std::string next;
    next.reserve(static_cast<std::size_t>(next_len));
    for (char c : out.letters) next += rule.images.at(c);
    out.letters = std::move(next);
    out.generation += 1;
  }
  return out;
}

SubstitutionMatrix substitution_matrix(const SubstitutionRule& rule) {
  validate_rule(rule);
  const std::size_t n = rule.alphabet.size();
  SubstitutionMatrix m;
  m.size = n;
  m.entries.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (char c : rule.images.at(rule.alphabet[i])) m(i, letter_index(rule, c)) += 1;
  return m;
}

std::vector<long long> letter_counts(const SubstitutionRule& rule, const TilingWord& seed,
                                     int steps) {
  if (steps < 0) fail(ErrorCode::InvalidArgument, "steps must be nonnegative");
  validate_rule(rule);
  const SubstitutionMatrix m = substitution_matrix(rule);
  std::vector<long long> counts = counts_of(rule, seed.letters);
  for (int s = 0; s < steps; ++s) counts = advance_counts(counts, m);
  return counts;
}

bool is_primitive(const SubstitutionMatrix& m, int k_cap) {
  if (k_cap < 1) fail(ErrorCode::InvalidArgument, "k_cap must be at least 1");
  const std::size_t n = m.size;
  if (n == 0) fail(ErrorCode::InvalidArgument, "matrix is empty");
  // Only the positivity pattern matters, so work with boolean matrices and
  // avoid integer blowup at large powers.
  std::vector<char> base(n * n), power(n * n);
  for (std::size_t i = 0; i < n * n; ++i) base[i] = m.entries[i] > 0 ? 1 : 0;
  power = base;
  for (int k = 1; k <= k_cap; ++k) {
    if (k > 1) {
      std::vector<char> next(n * n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l)
          if (power[i * n + l])
            for (std::size_t j = 0; j < n; ++j)
              if (base[l * n + j]) next[i * n + j] = 1;
      power = std::move(next);
    }
    bool all_positive = true;
    for (char v : power)
      if (!v) {
        all_positive = false;
        break;
      }
    if (all_positive) return true;
  }
  return false;
}

bool is_primitive(const SubstitutionMatrix& m) {
  const long long n = static_cast<long long>(m.size);
  const long long wielandt = n * n - 2 * n + 2;
  return is_primitive(m, static_cast<int>(std::max(wielandt, 1LL)));
}

PerronFrobenius perron_frobenius(const SubstitutionMatrix& m) {
  if (!is_primitive(m)) fail(ErrorCode::NotPrimitive, "matrix has no entrywise-positive power");
  const std::size_t n = m.size;

  // Characteristic polynomial by Faddeev-LeVerrier. Alphabets are tiny and
  // the entries are integers, so double arithmetic is exact here.
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n * n; ++i) a[i] = static_cast<double>(m.entries[i]);
  std::vector<double> work(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) work[i * n + i] = 1.0;
  std::vector<double> coeffs(n + 1, 0.0);
  coeffs[n] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<double> am(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j) am[i * n + j] += a[i * n + l] * work[l * n + j];
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += am[i * n + i];
    const double c = -trace / static_cast<double>(k);
    coeffs[n - k] = c;
    work = am;
    for (std::size_t i = 0; i < n; ++i) work[i * n + i] += c;
  }

  const auto roots = numerics::polynomial_roots(coeffs);
  double dominant = 0.0;
  double second = 0.0;
  for (const auto& r : roots) {
    const double mod = std::abs(r);
    if (mod > dominant) {
      second = dominant;
      dominant = mod;
    } else if (mod > second) {
      second = mod;
    }
  }
  PerronFrobenius out;
  out.eigenvalue = dominant;
  out.is_pisot = dominant > 1.0 + 1e-9 && second < 1.0 - 1e-9;
  return out;
}

}  // namespace qpspec::tiling
