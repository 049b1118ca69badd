#include "qpspec/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "qpspec/error.hpp"

namespace qpspec::potentials {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_unit(double x) {
  double w = x - std::floor(x);
  if (w >= 1.0) w -= 1.0;
  return w;
}

std::vector<FourierTerm> collect_terms(const std::vector<FourierTerm>& raw) {
  std::map<std::pair<int, int>, std::complex<double>> acc;
  for (const auto& t : raw) acc[{t.m, t.n}] += t.c;
  for (const auto& [key, c] : acc) {
    const auto mirror = acc.find({-key.first, -key.second});
    const std::complex<double> paired =
        mirror == acc.end() ? std::complex<double>(0.0, 0.0) : mirror->second;
    if (std::abs(paired - std::conj(c)) > 1e-12)
      fail(ErrorCode::InvalidArgument,
           "Fourier terms are not Hermitian-symmetric; the field would be complex");
  }
  std::vector<FourierTerm> out;
  out.reserve(acc.size());
  for (const auto& [key, c] : acc) out.push_back(FourierTerm{key.first, key.second, c});
  return out;
}

}  // namespace

CoefficientField CoefficientField::preset(const std::string& name, double theta,
                                          std::array<double, 2> offset) {
  std::vector<FourierTerm> terms;
  const std::complex<double> half_i(0.0, 0.5);
  if (name == "sin2d" || name == "sin2d+3") {
    terms = {{1, 0, -half_i}, {-1, 0, half_i}, {0, 1, -half_i}, {0, -1, half_i}};
    if (name == "sin2d+3") terms.push_back({0, 0, {3.0, 0.0}});
  } else if (name == "zero") {
    terms = {};
  } else {
    fail(ErrorCode::InvalidArgument, "unknown field preset '" + name + "'");
  }
  return fourier(terms, theta, offset);
}

CoefficientField CoefficientField::fourier(const std::vector<FourierTerm>& terms, double theta,
                                           std::array<double, 2> offset) {
  CoefficientField f;
  f.terms_ = collect_terms(terms);
  f.theta_ = theta;
  f.offset_ = offset;
  return f;
}

double CoefficientField::operator()(double x, double y) const {
  const double xw = wrap_unit(x);
  const double yw = wrap_unit(y);
  std::complex<double> sum(0.0, 0.0);
  for (const auto& t : terms_) {
    const double phase = kTwoPi * (t.m * xw + t.n * yw);
    sum += t.c * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum.real();
}

double slice(const CoefficientField& field, double x) {
  return field(x + field.offset()[0], field.theta() * x + field.offset()[1]);
}

Coefficient1D slice_coefficient(const CoefficientField& field) {
  Coefficient1D c;
  c.kind = CoefficientKind::QuasiperiodicSlice;
  c.period = std::nullopt;
  c.evaluator = [field](double x) { return slice(field, x); };
  return c;
}

Coefficient1D periodic_approximant(const CoefficientField& field,
                                   const contfrac::RationalApproximant& approx) {
  if (approx.q <= 0) fail(ErrorCode::InvalidArgument, "approximant denominator must be positive");
  Coefficient1D c;
  c.kind = CoefficientKind::Periodic;
  c.period = static_cast<double>(approx.q);
  const double p = static_cast<double>(approx.p);
  const double q = static_cast<double>(approx.q);
  c.evaluator = [field, p, q](double x) {
    // Wrap into [0, q) first so f(x + q) = f(x) holds exactly; both torus
    // coordinates shift by integers (q and p) under that translation.
    const double xa = q * wrap_unit(x / q);
    return field(xa, (p / q) * xa);
  };
  return c;
}

Coefficient1D reflect(const Coefficient1D& c) {
  Coefficient1D r;
  r.kind = CoefficientKind::Reflected;
  r.period = std::nullopt;
  const auto inner = c.evaluator;
  r.evaluator = [inner](double x) { return inner(std::fabs(x)); };
  return r;
}

Coefficient1D laminate_coefficient(const Laminate& lam, bool periodize) {
  if (lam.word.letters.empty()) fail(ErrorCode::EmptyWord, "laminate word is empty");
  std::vector<double> edges;
  std::vector<double> values;
  edges.reserve(lam.word.letters.size() + 1);
  values.reserve(lam.word.letters.size());
  edges.push_back(0.0);
  for (char letter : lam.word.letters) {
    const auto it = lam.tiles.find(letter);
    if (it == lam.tiles.end())
      fail(ErrorCode::UnknownLetter, std::string("no tile for letter '") + letter + "'");
    if (it->second.length <= 0.0 || it->second.value <= 0.0)
      fail(ErrorCode::InvalidArgument,
           std::string("tile '") + letter + "' needs positive length and value");
    edges.push_back(edges.back() + it->second.length);
    values.push_back(it->second.value);
  }
  const double total = edges.back();

  Coefficient1D c;
  c.kind = CoefficientKind::Laminate;
  c.period = periodize ? std::optional<double>(total) : std::nullopt;
  c.evaluator = [edges = std::move(edges), values = std::move(values), total,
                 periodize](double x) {
    double pos = x;
    if (periodize) {
      pos = total * wrap_unit(x / total);
    } else if (pos < 0.0) {
      return values.front();
    } else if (pos >= total) {
      return values.back();
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), pos);
    const std::size_t idx =
        std::min(values.size() - 1,
                 static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - edges.begin() - 1, 0)));
    return values[idx];
  };
  return c;
}

}  // namespace qpspec::potentials
