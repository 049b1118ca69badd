#include "qpspec/transfermap.hpp"

#include <algorithm>
#include <cmath>

#include "qpspec/error.hpp"
#include "qpspec/tiling.hpp"

namespace qpspec::transfermap {

namespace {

constexpr double kSaturation = 1e100;

const potentials::Tile& tile_for(const std::map<char, potentials::Tile>& tiles, char letter) {
  const auto it = tiles.find(letter);
  if (it == tiles.end())
    fail(ErrorCode::UnknownLetter, std::string("no tile for letter '") + letter + "'");
  if (it->second.length <= 0.0 || it->second.value <= 0.0)
    fail(ErrorCode::InvalidArgument,
         std::string("tile '") + letter + "' needs positive length and wavespeed");
  return it->second;
}

std::string fibonacci_word(int generation) {
  if (generation < 1) fail(ErrorCode::InvalidArgument, "generation must be at least 1");
  return tiling::substitute(tiling::fibonacci_rule(), {"a", 1}, generation - 1).letters;
}

// |mu_min| of a det-1 matrix with |trace| > 2, via 1/mu_max to avoid the
// cancellation in (|x| - sqrt(x^2 - 4)) / 2 at large traces.
double smaller_eigenvalue_modulus(double trace) {
  const double ax = std::fabs(trace);
  return 2.0 / (ax + std::sqrt(ax * ax - 4.0));
}

double cell_length(const std::map<char, potentials::Tile>& tiles, const std::string& word) {
  double total = 0.0;
  for (char letter : word) total += tile_for(tiles, letter).length;
  return total;
}

}  // namespace

TransferMatrix multiply(const TransferMatrix& lhs, const TransferMatrix& rhs) {
  TransferMatrix out;
  out.a = lhs.a * rhs.a + lhs.b * rhs.c;
  out.b = lhs.a * rhs.b + lhs.b * rhs.d;
  out.c = lhs.c * rhs.a + lhs.d * rhs.c;
  out.d = lhs.c * rhs.b + lhs.d * rhs.d;
  out.omega = lhs.omega;
  return out;
}

TransferMatrix tile_transfer(double length, double wavespeed, double omega) {
  if (length <= 0.0 || wavespeed <= 0.0)
    fail(ErrorCode::InvalidArgument, "tile length and wavespeed must be positive");
  if (omega < 0.0) fail(ErrorCode::InvalidArgument, "frequency must be nonnegative");
  TransferMatrix m;
  m.omega = omega;
  const double k = omega / wavespeed;
  const double kl = k * length;
  if (kl < 1e-12) {
    // Series limit: sin(kl)/k -> l and k sin(kl) -> k^2 l.
    m.a = std::cos(kl);
    m.b = length;
    m.c = -k * k * length;
    m.d = std::cos(kl);
    return m;
  }
  m.a = std::cos(kl);
  m.b = std::sin(kl) / k;
  m.c = -k * std::sin(kl);
  m.d = std::cos(kl);
  return m;
}

TransferMatrix word_transfer(const std::map<char, potentials::Tile>& tiles,
                             const std::string& word, double omega) {
  if (word.empty()) fail(ErrorCode::EmptyWord, "cannot build a transfer matrix of nothing");
  TransferMatrix m;
  m.omega = omega;
  for (char letter : word) {
    const auto& tile = tile_for(tiles, letter);
    m = multiply(tile_transfer(tile.length, tile.value, omega), m);
  }
  return m;
}

TraceSequence trace_sequence(const std::map<char, potentials::Tile>& tiles, double omega,
                             int n_max) {
  if (n_max < 3) fail(ErrorCode::InvalidArgument, "need at least 3 trace values");
  TraceSequence ts;
  ts.omega = omega;
  ts.values.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= 3; ++n)
    ts.values.push_back(word_transfer(tiles, fibonacci_word(n), omega).trace());
  for (int n = 3; n < n_max; ++n) {
    const double xn = ts.values[static_cast<std::size_t>(n) - 1];
    const double xm = ts.values[static_cast<std::size_t>(n) - 2];
    if (std::fabs(xn) > kSaturation && std::fabs(xm) > kSaturation) {
      ts.saturated = true;
      break;
    }
    ts.values.push_back(xn * xm - ts.values[static_cast<std::size_t>(n) - 3]);
  }
  return ts;
}

std::optional<SuperBandGapCertificate> certify_super_band_gap(const TraceSequence& ts,
                                                              double epsilon) {
  if (ts.values.size() < 3) fail(ErrorCode::InvalidArgument, "sequence has fewer than 3 values");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  const auto& x = ts.values;
  for (std::size_t n = 0; n + 2 < x.size(); ++n) {
    if (std::fabs(x[n]) > 2.0 && std::fabs(x[n + 1]) >= std::fabs(x[n]) &&
        std::fabs(x[n + 2]) >= std::fabs(x[n + 1])) {
      SuperBandGapCertificate cert;
      cert.omega_lo = ts.omega;
      cert.omega_hi = ts.omega;
      cert.index_n = static_cast<int>(n) + 1;
      cert.criterion = CertificateCriterion::Theorem;
      return cert;
    }
  }
  for (std::size_t n = 0; n + 1 < x.size(); ++n) {
    if (std::fabs(x[n]) > 2.0 + epsilon && std::fabs(x[n + 1]) > 2.0 + epsilon) {
      SuperBandGapCertificate cert;
      cert.omega_lo = ts.omega;
      cert.omega_hi = ts.omega;
      cert.index_n = static_cast<int>(n) + 1;
      cert.criterion = CertificateCriterion::Corollary;
      cert.epsilon = epsilon;
      return cert;
    }
  }
  return std::nullopt;
}

std::vector<SuperBandGapCertificate> scan_super_band_gaps(
    const std::map<char, potentials::Tile>& tiles, double omega_lo, double omega_hi,
    int resolution, double epsilon, int n_max) {
  if (resolution < 100) fail(ErrorCode::InvalidArgument, "need at least 100 scan samples");
  if (!(omega_lo < omega_hi)) fail(ErrorCode::InvalidArgument, "frequency window is empty");

  std::vector<SuperBandGapCertificate> out;
  const double step = (omega_hi - omega_lo) / static_cast<double>(resolution - 1);
  bool in_run = false;
  SuperBandGapCertificate run;
  bool run_all_theorem = true;
  for (int i = 0; i < resolution; ++i) {
    const double omega = omega_lo + static_cast<double>(i) * step;
    const auto ts = trace_sequence(tiles, omega, n_max);
    const auto cert = certify_super_band_gap(ts, epsilon);
    if (cert.has_value()) {
      if (!in_run) {
        in_run = true;
        run = *cert;
        run_all_theorem = cert->criterion == CertificateCriterion::Theorem;
      } else {
        run.omega_hi = omega;
        run.index_n = std::max(run.index_n, cert->index_n);
        run_all_theorem =
            run_all_theorem && cert->criterion == CertificateCriterion::Theorem;
      }
    } else if (in_run) {
      run.criterion = run_all_theorem ? CertificateCriterion::Theorem
                                      : CertificateCriterion::Corollary;
      run.epsilon = run_all_theorem ? 0.0 : epsilon;
      out.push_back(run);
      in_run = false;
    }
  }
  if (in_run) {
    run.criterion =
        run_all_theorem ? CertificateCriterion::Theorem : CertificateCriterion::Corollary;
    run.epsilon = run_all_theorem ? 0.0 : epsilon;
    out.push_back(run);
  }
  return out;
}

TransferMatrix period_transfer_schrodinger(const potentials::CoefficientField& field,
                                           const contfrac::RationalApproximant& approx,
                                           double lambda, int points_per_unit) {
  if (points_per_unit < 1) fail(ErrorCode::InvalidArgument, "points_per_unit must be positive");
  if (approx.q <= 0) fail(ErrorCode::InvalidArgument, "approximant denominator must be positive");
  const auto v = potentials::periodic_approximant(field, approx);
  const double period = static_cast<double>(approx.q);
  const long long n_steps = 4LL * points_per_unit * approx.q;
  const double s = period / static_cast<double>(n_steps);

  // Y' = [[0, 1], [V - lambda, 0]] Y, integrated column-wise.
  double y[4] = {1.0, 0.0, 0.0, 1.0};
  auto apply = [&](double x, const double* in, double* out) {
    const double w = v(x) - lambda;
    out[0] = in[2];
    out[1] = in[3];
    out[2] = w * in[0];
    out[3] = w * in[1];
  };
  double k1[4], k2[4], k3[4], k4[4], tmp[4];
  for (long long step = 0; step < n_steps; ++step) {
    const double x0 = static_cast<double>(step) * s;
    apply(x0, y, k1);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * s * k1[i];
    apply(x0 + 0.5 * s, tmp, k2);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * s * k2[i];
    apply(x0 + 0.5 * s, tmp, k3);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + s * k3[i];
    apply(x0 + s, tmp, k4);
    for (int i = 0; i < 4; ++i)
      y[i] += s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double det = y[0] * y[3] - y[1] * y[2];
    if (std::fabs(det - 1.0) > 1e-8) {
      if (!(det > 0.0))
        fail(ErrorCode::PrecisionExhausted, "transfer determinant collapsed during integration");
      const double scale = 1.0 / std::sqrt(det);
      for (int i = 0; i < 4; ++i) y[i] *= scale;
    }
  }
  TransferMatrix m;
  m.a = y[0];
  m.b = y[1];
  m.c = y[2];
  m.d = y[3];
  m.omega = lambda;
  return m;
}

double decay_rate_laminate(const std::map<char, potentials::Tile>& tiles, double omega,
                           const std::vector<int>& generations) {
  if (generations.empty()) fail(ErrorCode::InvalidArgument, "no generations listed");
  double rate = 0.0;
  bool first = true;
  for (int gen : generations) {
    const std::string word = fibonacci_word(gen);
    const auto m = word_transfer(tiles, word, omega);
    if (std::fabs(m.trace()) <= 2.0)
      fail(ErrorCode::NotInGap, "generation " + std::to_string(gen) +
                                    " cell has |trace| <= 2 at this frequency");
    const double r = std::log(smaller_eigenvalue_modulus(m.trace())) / cell_length(tiles, word);
    rate = first ? r : std::min(rate, r);
    first = false;
  }
  return rate;
}

double decay_rate_field(const potentials::CoefficientField& field, double lambda,
                        const std::vector<contfrac::RationalApproximant>& approximants,
                        int points_per_unit) {
  if (approximants.empty()) fail(ErrorCode::InvalidArgument, "no approximants listed");
  double rate = 0.0;
  bool first = true;
  for (const auto& approx : approximants) {
    const auto m = period_transfer_schrodinger(field, approx, lambda, points_per_unit);
    if (std::fabs(m.trace()) <= 2.0)
      fail(ErrorCode::NotInGap, "approximant q = " + std::to_string(approx.q) +
                                    " has |trace| <= 2 at this eigenvalue");
    const double r = std::log(smaller_eigenvalue_modulus(m.trace())) /
                     static_cast<double>(approx.q);
    rate = first ? r : std::min(rate, r);
    first = false;
  }
  return rate;
}

}  // namespace qpspec::transfermap
