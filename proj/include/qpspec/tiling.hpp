#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace qpspec::tiling {

// Substitution rule on a finite alphabet. Images must be nonempty words over
// the same alphabet (no negative powers, so plain strings suffice).
struct SubstitutionRule {
  std::vector<char> alphabet;
  std::map<char, std::string> images;
};

// Occurrence-count matrix: entry(i, j) is the number of times alphabet[j]
// appears in the image of alphabet[i]. The row-vs-column convention is fixed
// here and validated by the commuting-diagram property in the tests.
struct SubstitutionMatrix {
  std::size_t size = 0;
  std::vector<long long> entries;

  long long operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
  long long& operator()(std::size_t i, std::size_t j) { return entries[i * size + j]; }
};

struct TilingWord {
  std::string letters;
  int generation = 0;
};

struct PerronFrobenius {
  double eigenvalue = 0.0;
  bool is_pisot = false;
};

// The golden-mean rule a -> ab, b -> a.
SubstitutionRule fibonacci_rule();

// Apply the rule letterwise `steps` times and bump the generation counter.
// Explicit words are capped at 10^7 letters; use letter_counts past that.
TilingWord substitute(const SubstitutionRule& rule, const TilingWord& seed, int steps);

SubstitutionMatrix substitution_matrix(const SubstitutionRule& rule);

// Letter-count vector of substitute(rule, seed, steps), computed from the
// substitution matrix alone so it works far beyond the word-size cap.
// Entry j counts alphabet[j].
std::vector<long long> letter_counts(const SubstitutionRule& rule, const TilingWord& seed,
                                     int steps);

// True iff some power m^k with k <= k_cap is entrywise positive. The
// single-argument form uses the Wielandt bound n^2 - 2n + 2, which is sharp.
bool is_primitive(const SubstitutionMatrix& m, int k_cap);
bool is_primitive(const SubstitutionMatrix& m);

// Dominant eigenvalue of a primitive substitution matrix, and whether it is
// a Pisot number (dominant > 1, every other eigenvalue modulus < 1).
PerronFrobenius perron_frobenius(const SubstitutionMatrix& m);

}  // namespace qpspec::tiling
