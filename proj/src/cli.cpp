#include "qpspec/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpspec/contfrac.hpp"
#include "qpspec/error.hpp"
#include "qpspec/interface.hpp"
#include "qpspec/io.hpp"
#include "qpspec/potentials.hpp"
#include "qpspec/supercell.hpp"
#include "qpspec/superspace.hpp"
#include "qpspec/tiling.hpp"
#include "qpspec/transfermap.hpp"
#include "qpspec/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpspec::cli {

namespace {

using Json = nlohmann::ordered_json;

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

// Everything accumulated during a run: the raw config, the defaults that
// filled omitted fields (for meta.json), derived quantities worth reporting,
// and the artifact files, written in order once the computation succeeds.
struct RunContext {
  Json config;
  Json defaults_applied = Json::object();
  Json meta_extra = Json::object();
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> files;

  void emit(const std::string& name, const std::string& content) {
    files.emplace_back(name, content);
  }
};

void set_path(Json& root, const std::string& dotted, const Json& value) {
  Json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) fail(ErrorCode::ConfigError, "empty path segment in '" + dotted + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    if (!node->is_object())
      fail(ErrorCode::ConfigError, "'" + dotted.substr(0, dot) + "' is not an object");
    start = dot + 1;
  }
}

void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(ErrorCode::ConfigError, where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail(ErrorCode::ConfigError, "unknown key '" + item.key() + "' in " + where);
}

double as_number(const Json& v, const std::string& what) {
  if (!v.is_number()) fail(ErrorCode::ConfigError, what + " must be a number");
  return v.get<double>();
}

long long as_integer(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) fail(ErrorCode::ConfigError, what + " must be an integer");
  return v.get<long long>();
}

std::string as_string(const Json& v, const std::string& what) {
  if (!v.is_string()) fail(ErrorCode::ConfigError, what + " must be a string");
  return v.get<std::string>();
}

// Getters over the discretization block. Fallbacks are recorded under the
// dotted key so meta.json can list every default that filled an omitted
// field.
double get_number(const Json& block, const char* key, double fallback, RunContext& ctx) {
  if (block.contains(key)) return as_number(block.at(key), std::string("discretization.") + key);
  ctx.defaults_applied[std::string("discretization.") + key] = fallback;
  return fallback;
}

long long get_integer(const Json& block, const char* key, long long fallback, RunContext& ctx) {
  if (block.contains(key))
    return as_integer(block.at(key), std::string("discretization.") + key);
  ctx.defaults_applied[std::string("discretization.") + key] = fallback;
  return fallback;
}

std::string get_string(const Json& block, const char* key, const std::string& fallback,
                       RunContext& ctx) {
  if (block.contains(key)) return as_string(block.at(key), std::string("discretization.") + key);
  ctx.defaults_applied[std::string("discretization.") + key] = fallback;
  return fallback;
}

std::array<double, 2> as_window(const Json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2)
    fail(ErrorCode::ConfigError, what + " must be a [lo, hi] pair");
  const double lo = as_number(v.at(0), what + "[0]");
  const double hi = as_number(v.at(1), what + "[1]");
  if (!(lo < hi)) fail(ErrorCode::ConfigError, what + " must satisfy lo < hi");
  return {lo, hi};
}

std::array<double, 2> get_window(const Json& block, const char* key,
                                 std::array<double, 2> fallback, RunContext& ctx) {
  if (block.contains(key)) return as_window(block.at(key), std::string("discretization.") + key);
  ctx.defaults_applied[std::string("discretization.") + key] = Json::array({fallback[0], fallback[1]});
  return fallback;
}

double positive(double v, const std::string& what) {
  if (!(v > 0.0)) fail(ErrorCode::ConfigError, what + " must be positive");
  return v;
}

long long positive(long long v, const std::string& what) {
  if (v <= 0) fail(ErrorCode::ConfigError, what + " must be positive");
  return v;
}

// -------------------------------------------------------------------------
// Problem block

struct ThetaSpec {
  double value = kGolden;
  contfrac::ContinuedFraction cf;
  bool exact_rational = false;
  contfrac::RationalApproximant rational;
};

ThetaSpec parse_theta(const Json& v) {
  ThetaSpec t;
  if (v.is_string()) {
    if (v.get<std::string>() != "golden")
      fail(ErrorCode::ConfigError, "theta string form must be \"golden\"");
    t.cf = contfrac::cf_elements("golden", 40);
    t.value = kGolden;
    return t;
  }
  if (!v.is_object())
    fail(ErrorCode::ConfigError,
         "theta must be \"golden\", {\"cf\": [...]} or {\"rational\": [p, q]}");
  check_keys(v, "problem.theta", {"cf", "rational"});
  if (v.contains("cf") == v.contains("rational"))
    fail(ErrorCode::ConfigError, "theta needs exactly one of \"cf\" or \"rational\"");
  if (v.contains("cf")) {
    const Json& arr = v.at("cf");
    if (!arr.is_array() || arr.empty())
      fail(ErrorCode::ConfigError, "theta.cf must be a nonempty array of integers");
    for (const auto& e : arr) t.cf.elements.push_back(as_integer(e, "theta.cf element"));
    for (std::size_t i = 1; i < t.cf.elements.size(); ++i)
      if (t.cf.elements[i] < 1)
        fail(ErrorCode::ConfigError, "theta.cf elements after the first must be >= 1");
    t.value = contfrac::convergents(t.cf, static_cast<int>(t.cf.elements.size())).back().value();
    return t;
  }
  const Json& arr = v.at("rational");
  if (!arr.is_array() || arr.size() != 2)
    fail(ErrorCode::ConfigError, "theta.rational must be [p, q]");
  const long long p = as_integer(arr.at(0), "theta.rational p");
  const long long q = as_integer(arr.at(1), "theta.rational q");
  if (q < 1) fail(ErrorCode::ConfigError, "theta.rational q must be >= 1");
  t.exact_rational = true;
  t.rational = contfrac::RationalApproximant{p, q, 0, std::nullopt};
  t.value = static_cast<double>(p) / static_cast<double>(q);
  t.cf = contfrac::cf_elements(std::to_string(p) + "/" + std::to_string(q), 40);
  return t;
}

struct Problem {
  std::optional<potentials::CoefficientField> field;
  std::map<char, potentials::Tile> tiles;
  tiling::SubstitutionRule rule;
  bool generalized = false;
  std::string preset;
  ThetaSpec theta;
};

enum class Family { Field, Interface, Laminate, Rule };

Family family_of(const std::string& command) {
  if (command == "trace-scan") return Family::Laminate;
  if (command == "tiling-info") return Family::Rule;
  if (command == "interface") return Family::Interface;
  return Family::Field;
}

std::map<char, potentials::Tile> parse_tiles(const Json& v) {
  if (!v.is_object() || v.empty())
    fail(ErrorCode::ConfigError, "problem.tiles must be a nonempty object of single-letter keys");
  std::map<char, potentials::Tile> tiles;
  for (const auto& item : v.items()) {
    if (item.key().size() != 1)
      fail(ErrorCode::ConfigError, "tile name '" + item.key() + "' must be a single letter");
    check_keys(item.value(), "tile '" + item.key() + "'", {"length", "value"});
    if (!item.value().contains("length") || !item.value().contains("value"))
      fail(ErrorCode::ConfigError, "tile '" + item.key() + "' needs length and value");
    potentials::Tile tile;
    tile.length = positive(as_number(item.value().at("length"), "tile length"), "tile length");
    tile.value = positive(as_number(item.value().at("value"), "tile value"), "tile value");
    tiles[item.key()[0]] = tile;
  }
  return tiles;
}

tiling::SubstitutionRule parse_rule(const Json& problem) {
  if (!problem.contains("alphabet") || !problem.contains("images"))
    fail(ErrorCode::ConfigError, "tiling-info needs problem.alphabet and problem.images");
  tiling::SubstitutionRule rule;
  const Json& alphabet = problem.at("alphabet");
  if (!alphabet.is_array() || alphabet.empty())
    fail(ErrorCode::ConfigError, "problem.alphabet must be a nonempty array of letters");
  for (const auto& a : alphabet) {
    const std::string s = as_string(a, "alphabet entry");
    if (s.size() != 1) fail(ErrorCode::ConfigError, "alphabet entries must be single letters");
    rule.alphabet.push_back(s[0]);
  }
  const Json& images = problem.at("images");
  if (!images.is_object()) fail(ErrorCode::ConfigError, "problem.images must be an object");
  for (const auto& item : images.items()) {
    if (item.key().size() != 1)
      fail(ErrorCode::ConfigError, "image key '" + item.key() + "' must be a single letter");
    rule.images[item.key()[0]] = as_string(item.value(), "image of '" + item.key() + "'");
  }
  for (char a : rule.alphabet)
    if (!rule.images.count(a))
      fail(ErrorCode::ConfigError, std::string("no image for letter '") + a + "'");
  return rule;
}

potentials::CoefficientField build_field(const Json& spec, const ThetaSpec& theta,
                                         std::array<double, 2> offset) {
  if (spec.is_string())
    return potentials::CoefficientField::preset(spec.get<std::string>(), theta.value, offset);
  if (spec.is_object()) {
    check_keys(spec, "problem.field", {"fourier"});
    if (!spec.contains("fourier"))
      fail(ErrorCode::ConfigError, "problem.field object form needs a \"fourier\" array");
    const Json& arr = spec.at("fourier");
    if (!arr.is_array()) fail(ErrorCode::ConfigError, "field.fourier must be an array");
    std::vector<potentials::FourierTerm> terms;
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 4)
        fail(ErrorCode::ConfigError, "each Fourier term must be [m, n, re, im]");
      potentials::FourierTerm t;
      t.m = static_cast<int>(as_integer(e.at(0), "Fourier m"));
      t.n = static_cast<int>(as_integer(e.at(1), "Fourier n"));
      t.c = {as_number(e.at(2), "Fourier re"), as_number(e.at(3), "Fourier im")};
      terms.push_back(t);
    }
    return potentials::CoefficientField::fourier(terms, theta.value, offset);
  }
  fail(ErrorCode::ConfigError, "problem.field must be a preset name or {\"fourier\": [...]}");
}

void note_preset_default(RunContext& ctx, const std::string& key, const Json& v) {
  ctx.defaults_applied["problem." + key] = v;
}

Problem parse_problem(const Json& cfg, const std::string& command, RunContext& ctx) {
  if (!cfg.contains("problem")) fail(ErrorCode::ConfigError, "config needs a \"problem\" block");
  const Json& block = cfg.at("problem");
  const Family family = family_of(command);

  std::set<std::string> allowed;
  switch (family) {
    case Family::Field: allowed = {"preset", "field", "theta", "offset", "generalized"}; break;
    case Family::Interface:
      allowed = {"preset", "field", "theta", "offset", "generalized", "reflected"};
      break;
    case Family::Laminate: allowed = {"preset", "tiles"}; break;
    case Family::Rule: allowed = {"preset", "alphabet", "images"}; break;
  }
  check_keys(block, "problem", allowed);

  Problem prob;
  std::array<double, 2> offset = {0.0, 0.0};
  Json field_spec;
  Json theta_spec = "golden";
  bool reflected = false;

  if (block.contains("preset")) {
    prob.preset = as_string(block.at("preset"), "problem.preset");
    for (const auto& item : block.items())
      if (item.key() != "preset" && item.key() != "offset")
        fail(ErrorCode::ConfigError,
             "problem.preset cannot be combined with '" + item.key() + "'");
    if (prob.preset == "sin2d-schrodinger" || prob.preset == "sin2d-generalized" ||
        prob.preset == "reflected-schrodinger" || prob.preset == "reflected-generalized") {
      prob.generalized = prob.preset == "sin2d-generalized" ||
                         prob.preset == "reflected-generalized";
      reflected = prob.preset.rfind("reflected-", 0) == 0;
      field_spec = prob.generalized ? "sin2d+3" : "sin2d";
      note_preset_default(ctx, "field", field_spec);
      note_preset_default(ctx, "theta", "golden");
      note_preset_default(ctx, "generalized", prob.generalized);
      if (family == Family::Interface) note_preset_default(ctx, "reflected", reflected);
    } else if (prob.preset == "golden-laminate") {
      prob.tiles = {{'a', {1.0, 1.0}}, {'b', {1.0, 2.0}}};
      prob.rule = tiling::fibonacci_rule();
      note_preset_default(ctx, "tiles",
                          Json{{"a", {{"length", 1.0}, {"value", 1.0}}},
                               {"b", {{"length", 1.0}, {"value", 2.0}}}});
    } else {
      fail(ErrorCode::ConfigError, "unknown problem preset '" + prob.preset + "'");
    }
  }

  switch (family) {
    case Family::Field:
    case Family::Interface: {
      if (prob.preset == "golden-laminate")
        fail(ErrorCode::ConfigError, "'" + command + "' needs a coefficient-field problem");
      if ((prob.preset == "reflected-schrodinger" || prob.preset == "reflected-generalized") &&
          family == Family::Field)
        fail(ErrorCode::ConfigError,
             "preset '" + prob.preset + "' is an interface problem; use the interface command");
      if ((prob.preset == "sin2d-schrodinger" || prob.preset == "sin2d-generalized") &&
          family == Family::Interface)
        fail(ErrorCode::ConfigError,
             "the interface command needs a reflected preset or \"reflected\": true");
      if (prob.preset.empty()) {
        if (!block.contains("field") || !block.contains("theta"))
          fail(ErrorCode::ConfigError, "explicit problems need \"field\" and \"theta\"");
        field_spec = block.at("field");
        theta_spec = block.at("theta");
        if (block.contains("generalized")) {
          if (!block.at("generalized").is_boolean())
            fail(ErrorCode::ConfigError, "problem.generalized must be a boolean");
          prob.generalized = block.at("generalized").get<bool>();
        } else {
          note_preset_default(ctx, "generalized", false);
        }
        if (family == Family::Interface) {
          if (!block.contains("reflected") || !block.at("reflected").is_boolean() ||
              !block.at("reflected").get<bool>())
            fail(ErrorCode::ConfigError,
                 "the interface command needs \"reflected\": true (the operator is defined "
                 "through the even extension)");
        }
      }
      if (block.contains("offset")) {
        const Json& o = block.at("offset");
        if (!o.is_array() || o.size() != 2)
          fail(ErrorCode::ConfigError, "problem.offset must be [y1, y2]");
        offset = {as_number(o.at(0), "offset y1"), as_number(o.at(1), "offset y2")};
      } else {
        note_preset_default(ctx, "offset", Json::array({0.0, 0.0}));
      }
      prob.theta = parse_theta(theta_spec);
      prob.field = build_field(field_spec, prob.theta, offset);
      break;
    }
    case Family::Laminate: {
      if (prob.preset.empty()) {
        if (!block.contains("tiles"))
          fail(ErrorCode::ConfigError, "trace-scan needs problem.tiles or a laminate preset");
        prob.tiles = parse_tiles(block.at("tiles"));
      } else if (prob.preset != "golden-laminate") {
        fail(ErrorCode::ConfigError, "trace-scan needs the golden-laminate preset or tiles");
      }
      break;
    }
    case Family::Rule: {
      if (prob.preset.empty()) {
        prob.rule = parse_rule(block);
      } else if (prob.preset != "golden-laminate") {
        fail(ErrorCode::ConfigError,
             "tiling-info accepts the golden-laminate preset or an explicit rule");
      }
      break;
    }
  }
  return prob;
}

contfrac::RationalApproximant approximant_at(const ThetaSpec& theta, int level) {
  if (level < 0) fail(ErrorCode::ConfigError, "approximant level must be nonnegative");
  if (static_cast<std::size_t>(level) >= theta.cf.elements.size())
    fail(ErrorCode::ConfigError,
         "approximant level " + std::to_string(level) +
             " exceeds the available continued fraction elements");
  return contfrac::convergents(theta.cf, level + 1).back();
}

// -------------------------------------------------------------------------
// Artifact helpers

std::string gaps_json(const std::vector<supercell::Gap>& gaps) {
  Json arr = Json::array();
  for (const auto& g : gaps) arr.push_back(Json{{"lo", g.lo}, {"hi", g.hi}});
  return arr.dump(2) + "\n";
}

std::string band_plot_script(std::size_t n_bands) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key off\n";
  s += "set xlabel 'alpha'\n";
  s += "set ylabel 'eigenvalue'\n";
  s += "plot for [b=2:" + std::to_string(n_bands + 1) +
       "] 'bands.csv' using 1:b with lines lc rgb '#305090'\n";
  return s;
}

std::string spectrum_plot_script(const std::string& csv_name) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key off\n";
  s += "set xlabel 'index'\n";
  s += "set ylabel 'eigenvalue'\n";
  s += "plot '" + csv_name + "' using 1:2 with points pt 7 ps 0.4\n";
  return s;
}

// -------------------------------------------------------------------------
// Commands

void run_bands(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization",
             {"level", "alpha_count", "n_bands", "points_per_unit", "window"});
  contfrac::RationalApproximant approx;
  if (prob.theta.exact_rational) {
    if (disc.contains("level"))
      fail(ErrorCode::ConfigError, "level conflicts with an exact rational theta");
    approx = prob.theta.rational;
  } else {
    approx = approximant_at(prob.theta, static_cast<int>(get_integer(disc, "level", 6, ctx)));
  }
  const int alpha_count = static_cast<int>(
      positive(get_integer(disc, "alpha_count", supercell::kDefaultAlphaCount, ctx),
               "alpha_count"));
  const int n_bands =
      static_cast<int>(positive(get_integer(disc, "n_bands", 30, ctx), "n_bands"));
  const int ppu = static_cast<int>(
      positive(get_integer(disc, "points_per_unit", supercell::kDefaultPointsPerUnit, ctx),
               "points_per_unit"));
  std::optional<std::array<double, 2>> window;
  if (disc.contains("window")) window = as_window(disc.at("window"), "discretization.window");

  const auto bd = supercell::band_diagram(*prob.field, approx, alpha_count, n_bands, ppu,
                                          prob.generalized, true);

  io::CsvTable table;
  const std::size_t kept = bd.bands.front().size();
  table.header.push_back("alpha");
  for (std::size_t b = 0; b < kept; ++b) table.header.push_back("band_" + std::to_string(b));
  for (std::size_t j = 0; j < bd.alphas.size(); ++j) {
    std::vector<double> row;
    row.reserve(kept + 1);
    row.push_back(bd.alphas[j]);
    row.insert(row.end(), bd.bands[j].begin(), bd.bands[j].end());
    table.rows.push_back(std::move(row));
  }
  ctx.emit("bands.csv", io::to_csv(table));
  if (window) {
    const auto gaps = supercell::extract_gaps(bd, (*window)[0], (*window)[1]);
    ctx.emit("gaps.json", gaps_json(gaps.gaps));
  }
  ctx.emit("bands.gp", band_plot_script(kept));

  ctx.meta_extra["approximant"] = Json{{"p", approx.p}, {"q", approx.q}};
  ctx.meta_extra["theta_effective"] = approx.value();
}

void run_superspace(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization", {"h", "alpha", "beta", "n_eigs", "mode_near"});
  superspace::LiftedProblem p(*prob.field);
  p.h = positive(get_number(disc, "h", superspace::kDefaultMeshSize, ctx), "h");
  p.alpha = get_number(disc, "alpha", 0.0, ctx);
  p.beta = get_number(disc, "beta", 0.0, ctx);
  p.generalized = prob.generalized;
  const int n_eigs =
      static_cast<int>(positive(get_integer(disc, "n_eigs", 40, ctx), "n_eigs"));

  const auto mesh = superspace::lifted_mesh(p);
  const auto spectrum = superspace::superspace_spectrum_fd(p, n_eigs, true);

  io::CsvTable table;
  table.header = {"index", "eigenvalue"};
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
    table.rows.push_back({static_cast<double>(i), spectrum.eigenvalues[i]});
  ctx.emit("spectrum.csv", io::to_csv(table));

  if (disc.contains("mode_near")) {
    const double target = as_number(disc.at("mode_near"), "discretization.mode_near");
    const auto mode = superspace::lifted_mode_fd(p, target);
    io::CsvTable mt;
    mt.header = {"x", "y", "re_u", "im_u"};
    for (int i = 0; i < mode.mesh.n_x; ++i)
      for (int j = 0; j < mode.mesh.n_y; ++j) {
        const auto& u = mode.values[static_cast<std::size_t>(i) *
                                        static_cast<std::size_t>(mode.mesh.n_y) +
                                    static_cast<std::size_t>(j)];
        mt.rows.push_back({static_cast<double>(i) * mode.mesh.h_x,
                           static_cast<double>(j) * mode.mesh.h_y, u.real(), u.imag()});
      }
    ctx.emit("mode.csv", io::to_csv(mt));
    ctx.meta_extra["mode_eigenvalue"] = mode.lambda;
  }
  ctx.emit("spectrum.gp", spectrum_plot_script("spectrum.csv"));

  ctx.meta_extra["theta_mesh"] = mesh.theta_mesh;
  ctx.meta_extra["mesh"] = Json{{"n_x", mesh.n_x}, {"n_y", mesh.n_y}};
}

void run_pwe(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization", {"n_pw", "alpha", "beta", "n_eigs", "h", "gaps", "margin"});
  superspace::PlaneWaveProblem pw(*prob.field);
  pw.n_pw = static_cast<int>(
      positive(get_integer(disc, "n_pw", superspace::kDefaultPlaneWaves, ctx), "n_pw"));
  pw.alpha = get_number(disc, "alpha", 0.0, ctx);
  pw.beta = get_number(disc, "beta", 0.0, ctx);
  pw.generalized = prob.generalized;
  const int n_eigs =
      static_cast<int>(positive(get_integer(disc, "n_eigs", 40, ctx), "n_eigs"));

  const auto pwe = superspace::superspace_spectrum_pwe(pw, n_eigs, true);
  io::CsvTable table;
  table.header = {"index", "eigenvalue"};
  for (std::size_t i = 0; i < pwe.eigenvalues.size(); ++i)
    table.rows.push_back({static_cast<double>(i), pwe.eigenvalues[i]});
  ctx.emit("spectrum.csv", io::to_csv(table));
  ctx.emit("spectrum.gp", spectrum_plot_script("spectrum.csv"));

  if (disc.contains("h") != disc.contains("gaps"))
    fail(ErrorCode::ConfigError,
         "the pollution comparison needs both \"h\" (finite-difference mesh) and \"gaps\"");
  if (!disc.contains("gaps")) return;

  supercell::GapSet gapset;
  const Json& gaps = disc.at("gaps");
  if (!gaps.is_array() || gaps.empty())
    fail(ErrorCode::ConfigError, "discretization.gaps must be a nonempty array of [lo, hi]");
  for (const auto& g : gaps) {
    const auto w = as_window(g, "gap entry");
    gapset.gaps.push_back({w[0], w[1]});
  }
  gapset.window_lo = gapset.gaps.front().lo;
  gapset.window_hi = gapset.gaps.front().hi;
  for (const auto& g : gapset.gaps) {
    gapset.window_lo = std::min(gapset.window_lo, g.lo);
    gapset.window_hi = std::max(gapset.window_hi, g.hi);
  }
  const double margin = positive(get_number(disc, "margin", 1e-3, ctx), "margin");

  superspace::LiftedProblem fd(*prob.field);
  fd.h = positive(as_number(disc.at("h"), "discretization.h"), "h");
  fd.alpha = pw.alpha;
  fd.beta = pw.beta;
  fd.generalized = prob.generalized;
  const auto mesh = superspace::lifted_mesh(fd);
  const auto fds = superspace::superspace_spectrum_fd(fd, n_eigs, true);

  io::CsvTable ft;
  ft.header = {"index", "eigenvalue"};
  for (std::size_t i = 0; i < fds.eigenvalues.size(); ++i)
    ft.rows.push_back({static_cast<double>(i), fds.eigenvalues[i]});
  ctx.emit("fd_spectrum.csv", io::to_csv(ft));

  const auto report =
      superspace::pollution_report(fds.eigenvalues, pwe.eigenvalues, gapset, margin);
  Json arr = Json::array();
  for (const auto& e : report)
    arr.push_back(Json{{"gap", Json{{"lo", e.gap.lo}, {"hi", e.gap.hi}}},
                       {"fd_count", e.fd_count},
                       {"pwe_count", e.pwe_count}});
  ctx.emit("pollution.json", arr.dump(2) + "\n");
  ctx.meta_extra["theta_mesh"] = mesh.theta_mesh;
}

void run_trace_scan(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization", {"window", "resolution", "epsilon", "n_max"});
  const auto window = get_window(disc, "window", {0.0, 20.0}, ctx);
  const int resolution =
      static_cast<int>(positive(get_integer(disc, "resolution", 2000, ctx), "resolution"));
  const double epsilon = positive(get_number(disc, "epsilon", 1e-3, ctx), "epsilon");
  const int n_max = static_cast<int>(positive(get_integer(disc, "n_max", 40, ctx), "n_max"));

  const auto certs = transfermap::scan_super_band_gaps(prob.tiles, window[0], window[1],
                                                       resolution, epsilon, n_max);
  Json arr = Json::array();
  for (const auto& c : certs)
    arr.push_back(Json{
        {"lo", c.omega_lo},
        {"hi", c.omega_hi},
        {"index_n", c.index_n},
        {"criterion",
         c.criterion == transfermap::CertificateCriterion::Theorem ? "theorem" : "corollary"},
        {"epsilon", c.epsilon}});
  ctx.emit("gaps.json", arr.dump(2) + "\n");

  // Same grid as the scan: resolution points with both window ends included.
  io::CsvTable table;
  table.header = {"omega"};
  for (int n = 1; n <= n_max; ++n) table.header.push_back("x" + std::to_string(n));
  table.header.push_back("certified");
  table.header.push_back("N");
  const double step = (window[1] - window[0]) / static_cast<double>(resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    const double omega = window[0] + static_cast<double>(i) * step;
    const auto ts = transfermap::trace_sequence(prob.tiles, omega, n_max);
    const auto cert = transfermap::certify_super_band_gap(ts, epsilon);
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(n_max) + 3);
    row.push_back(omega);
    for (int n = 0; n < n_max; ++n)
      row.push_back(n < static_cast<int>(ts.values.size()) ? ts.values[static_cast<std::size_t>(n)]
                                                           : std::nan(""));
    row.push_back(cert.has_value() ? 1.0 : 0.0);
    row.push_back(cert.has_value() ? static_cast<double>(cert->index_n) : std::nan(""));
    table.rows.push_back(std::move(row));
  }
  ctx.emit("scan.csv", io::to_csv(table));

  std::string gp;
  gp += "set datafile separator ','\n";
  gp += "set xlabel 'omega'\n";
  gp += "set ylabel 'trace'\n";
  gp += "set yrange [-6:6]\n";
  gp += "plot 'scan.csv' using 1:4 with lines title 'x3', \\\n";
  gp += "     'scan.csv' using 1:5 with lines title 'x4', \\\n";
  gp += "     'scan.csv' using 1:($" + std::to_string(n_max + 2) +
        "*4-2) with lines title 'certified'\n";
  ctx.emit("scan.gp", gp);
}

void run_interface(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization",
             {"L", "h", "boundary", "window", "level", "alpha_count", "n_bands",
              "points_per_unit"});
  const bool schrodinger_preset = prob.preset == "reflected-schrodinger";
  // At the generic default width the sin-pair interface modes decay too
  // slowly to separate from the wall states, so the preset that carries them
  // defaults to a wider domain and the figure's spectral window.
  const double default_L = schrodinger_preset ? 100.0 : 34.0;
  const std::array<double, 2> default_window =
      schrodinger_preset ? std::array<double, 2>{8.0, 30.0} : std::array<double, 2>{1.0, 12.0};

  const double L = positive(get_number(disc, "L", default_L, ctx), "L");
  const double h = positive(get_number(disc, "h", 0.005, ctx), "h");
  const std::string boundary = get_string(disc, "boundary", "dirichlet", ctx);
  if (boundary != "dirichlet" && boundary != "neumann")
    fail(ErrorCode::ConfigError, "boundary must be \"dirichlet\" or \"neumann\"");
  std::array<double, 2> window{};
  if (prob.preset.empty()) {
    if (!disc.contains("window"))
      fail(ErrorCode::ConfigError, "explicit interface problems need a spectral window");
    window = as_window(disc.at("window"), "discretization.window");
  } else {
    window = get_window(disc, "window", default_window, ctx);
  }
  const int alpha_count =
      static_cast<int>(positive(get_integer(disc, "alpha_count", 33, ctx), "alpha_count"));
  const int n_bands =
      static_cast<int>(positive(get_integer(disc, "n_bands", 300, ctx), "n_bands"));
  const int ppu = static_cast<int>(
      positive(get_integer(disc, "points_per_unit", 25, ctx), "points_per_unit"));
  contfrac::RationalApproximant cert_approx;
  if (prob.theta.exact_rational) {
    if (disc.contains("level"))
      fail(ErrorCode::ConfigError, "level conflicts with an exact rational theta");
    cert_approx = prob.theta.rational;
  } else {
    cert_approx =
        approximant_at(prob.theta, static_cast<int>(get_integer(disc, "level", 6, ctx)));
  }

  const auto bd = supercell::band_diagram(*prob.field, cert_approx, alpha_count, n_bands, ppu,
                                          prob.generalized, true);
  const auto gapset = supercell::extract_gaps(bd, window[0], window[1]);
  ctx.emit("gaps.json", gaps_json(gapset.gaps));

  Json summary = Json::array();
  if (!gapset.gaps.empty()) {
    // Search window: the certified gaps inflated by 5 percent, clipped to the
    // certification window, searched in one solve over their hull.
    double lo = window[1], hi = window[0];
    for (const auto& g : gapset.gaps) {
      const double center = 0.5 * (g.lo + g.hi);
      const double half = 0.525 * (g.hi - g.lo);
      lo = std::min(lo, std::max(window[0], center - half));
      hi = std::max(hi, std::min(window[1], center + half));
    }

    interface::InterfaceProblem ip(
        potentials::reflect(potentials::slice_coefficient(*prob.field)));
    ip.half_width = L;
    ip.h = h;
    ip.generalized = prob.generalized;
    ip.boundary =
        boundary == "neumann" ? interface::Boundary::Neumann : interface::Boundary::Dirichlet;

    const auto candidates = interface::solve_interface(ip, lo, hi);
    const auto modes = interface::classify_modes(candidates, gapset);

    // Decay estimate: minimum over the approximant cells k = 2..6 that are
    // gapped at the mode's eigenvalue. The generalized equation u'' =
    // -lambda rho u integrates through the same transfer kernel with the
    // field scaled by -lambda and the spectral parameter fixed at zero.
    std::vector<contfrac::RationalApproximant> levels;
    if (prob.theta.exact_rational) {
      levels.push_back(prob.theta.rational);
    } else {
      for (int k = 2; k <= 6; ++k) levels.push_back(approximant_at(prob.theta, k));
    }

    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& m = modes[i];
      std::optional<double> estimate;
      potentials::CoefficientField est_field = *prob.field;
      double est_lambda = m.lambda;
      if (prob.generalized) {
        auto terms = prob.field->fourier_terms();
        for (auto& t : terms) t.c *= -m.lambda;
        est_field = potentials::CoefficientField::fourier(terms, prob.theta.value,
                                                          prob.field->offset());
        est_lambda = 0.0;
      }
      for (const auto& level : levels) {
        try {
          const double r = transfermap::decay_rate_field(est_field, est_lambda, {level}, ppu);
          if (!estimate || r < *estimate) estimate = r;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotInGap) throw;
        }
      }

      io::CsvTable mt;
      mt.header = {"x", "u"};
      for (std::size_t s = 0; s < m.x.size(); ++s) mt.rows.push_back({m.x[s], m.values[s]});
      ctx.emit("mode_" + std::to_string(i) + ".csv", io::to_csv(mt));

      Json entry;
      entry["eigenvalue"] = m.lambda;
      entry["gap"] = Json{{"lo", m.gap.lo}, {"hi", m.gap.hi}};
      entry["isolation_margin"] = m.isolation_margin;
      entry["boundary_fraction"] = m.boundary_fraction;
      entry["fitted_rate"] = m.decay_rate;
      if (estimate) {
        entry["estimated_rate"] = *estimate;
        entry["deviation"] = interface::compare_decay(m, *estimate);
      } else {
        entry["estimated_rate"] = nullptr;
        entry["deviation"] = nullptr;
      }
      summary.push_back(entry);
    }

    if (!modes.empty()) {
      std::string gp;
      gp += "set datafile separator ','\n";
      gp += "set xlabel 'x'\n";
      gp += "set ylabel 'u'\n";
      gp += "plot ";
      for (std::size_t i = 0; i < modes.size(); ++i) {
        if (i) gp += ", \\\n     ";
        gp += "'mode_" + std::to_string(i) + ".csv' using 1:2 with lines title 'mode " +
              std::to_string(i) + "'";
      }
      gp += "\n";
      ctx.emit("modes.gp", gp);
    }
  }
  ctx.emit("summary.json", summary.dump(2) + "\n");
  ctx.meta_extra["approximant"] = Json{{"p", cert_approx.p}, {"q", cert_approx.q}};
}

void run_convergence(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization", {"levels", "window", "alpha_count", "points_per_unit"});
  std::vector<int> level_indices;
  if (disc.contains("levels")) {
    const Json& arr = disc.at("levels");
    if (!arr.is_array() || arr.size() < 3)
      fail(ErrorCode::ConfigError, "levels must list at least 3 approximant indices");
    for (const auto& e : arr)
      level_indices.push_back(static_cast<int>(as_integer(e, "levels entry")));
  } else {
    level_indices = {2, 4, 6, 8};
    ctx.defaults_applied["discretization.levels"] = Json::array({2, 4, 6, 8});
  }
  const auto window = get_window(disc, "window", {0.0, 20.0}, ctx);
  const int alpha_count =
      static_cast<int>(positive(get_integer(disc, "alpha_count", 33, ctx), "alpha_count"));
  const int ppu = static_cast<int>(
      positive(get_integer(disc, "points_per_unit", 30, ctx), "points_per_unit"));

  std::vector<contfrac::RationalApproximant> levels;
  for (int k : level_indices) levels.push_back(approximant_at(prob.theta, k));

  const auto study = supercell::convergence_study(*prob.field, levels, window[0], window[1],
                                                  alpha_count, ppu, prob.generalized, true);

  io::CsvTable table;
  table.header = {"q", "hausdorff"};
  for (const auto& p : study.pairs)
    table.rows.push_back({static_cast<double>(p.q), p.hausdorff});
  ctx.emit("convergence.csv", io::to_csv(table));

  Json summary;
  Json pairs = Json::array();
  for (const auto& p : study.pairs)
    pairs.push_back(Json{{"q", p.q}, {"hausdorff", p.hausdorff}});
  summary["pairs"] = pairs;
  summary["fitted_c"] = study.fitted_c;
  summary["loglog_slope"] = study.loglog_slope;
  ctx.emit("summary.json", summary.dump(2) + "\n");

  std::string gp;
  gp += "set datafile separator ','\n";
  gp += "set logscale xy\n";
  gp += "set xlabel 'q'\n";
  gp += "set ylabel 'Hausdorff distance'\n";
  gp += "plot 'convergence.csv' using 1:2 with linespoints title 'measured', \\\n";
  gp += "     " + io::format_number(study.fitted_c) + "/x with lines title 'C/q'\n";
  ctx.emit("convergence.gp", gp);
}

void run_tiling_info(const Json& disc, const Problem& prob, RunContext& ctx) {
  check_keys(disc, "discretization", {"generations"});
  const long long generations = get_integer(disc, "generations", 8, ctx);
  if (generations < 0) fail(ErrorCode::ConfigError, "generations must be nonnegative");

  const auto matrix = tiling::substitution_matrix(prob.rule);
  const bool primitive = tiling::is_primitive(matrix);

  Json info;
  Json alphabet = Json::array();
  for (char a : prob.rule.alphabet) alphabet.push_back(std::string(1, a));
  info["alphabet"] = alphabet;
  Json images;
  for (char a : prob.rule.alphabet) images[std::string(1, a)] = prob.rule.images.at(a);
  info["images"] = images;
  Json rows = Json::array();
  for (std::size_t i = 0; i < matrix.size; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < matrix.size; ++j) row.push_back(matrix(i, j));
    rows.push_back(row);
  }
  info["matrix"] = rows;
  info["primitive"] = primitive;
  if (primitive) {
    const auto pf = tiling::perron_frobenius(matrix);
    info["perron_frobenius"] = Json{{"eigenvalue", pf.eigenvalue}, {"is_pisot", pf.is_pisot}};
  } else {
    info["perron_frobenius"] = nullptr;
  }

  const tiling::TilingWord seed{std::string(1, prob.rule.alphabet.front()), 0};
  Json growth = Json::array();
  for (long long g = 0; g <= generations; ++g) {
    const auto counts = tiling::letter_counts(prob.rule, seed, static_cast<int>(g));
    long long total = 0;
    Json by_letter;
    for (std::size_t j = 0; j < prob.rule.alphabet.size(); ++j) {
      by_letter[std::string(1, prob.rule.alphabet[j])] = counts[j];
      total += counts[j];
    }
    growth.push_back(Json{{"generation", g}, {"length", total}, {"counts", by_letter}});
  }
  info["growth"] = growth;

  tiling::TilingWord sample = seed;
  while (sample.generation < generations) {
    const auto next = tiling::substitute(prob.rule, sample, 1);
    if (next.letters.size() > 120) break;
    sample = next;
  }
  info["sample_word"] = sample.letters;
  info["sample_generation"] = sample.generation;

  ctx.emit("tiling.json", info.dump(2) + "\n");
}

// -------------------------------------------------------------------------
// Driver

void apply_override(Json& root, const std::string& kv) {
  const std::size_t eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorCode::ConfigError, "override '" + kv + "' is not key=value");
  const std::string key = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_path(root, key, value);
}

const std::set<std::string> kCommands = {"bands",     "superspace",  "pwe",        "trace-scan",
                                         "interface", "convergence", "tiling-info"};

}  // namespace

int run_options(const CliOptions& options) {
  RunContext ctx;
  try {
    if (options.threads < 0) fail(ErrorCode::ConfigError, "--threads must be positive");
#ifdef _OPENMP
    if (options.threads > 0) omp_set_num_threads(options.threads);
#endif
    if (options.config_path.empty()) fail(ErrorCode::ConfigError, "--config is required");

    ctx.config = Json::parse(io::read_file(options.config_path));
    for (const auto& kv : options.overrides) apply_override(ctx.config, kv);

    check_keys(ctx.config, "config", {"command", "problem", "discretization", "output"});
    if (!ctx.config.contains("command"))
      fail(ErrorCode::ConfigError, "config needs a \"command\"");
    const std::string command = as_string(ctx.config.at("command"), "command");
    if (!kCommands.count(command))
      fail(ErrorCode::ConfigError, "unknown command '" + command + "'");

    ctx.out_dir = options.out_dir;
    if (ctx.out_dir.empty() && ctx.config.contains("output"))
      ctx.out_dir = as_string(ctx.config.at("output"), "output");
    if (ctx.out_dir.empty())
      fail(ErrorCode::ConfigError, "no output directory (config \"output\" or --out)");
    std::error_code fs_err;
    std::filesystem::create_directories(ctx.out_dir, fs_err);
    if (fs_err)
      fail(ErrorCode::ConfigError,
           "cannot create output directory '" + ctx.out_dir + "': " + fs_err.message());

    const Problem prob = parse_problem(ctx.config, command, ctx);
    Json disc = Json::object();
    if (ctx.config.contains("discretization")) {
      disc = ctx.config.at("discretization");
      if (!disc.is_object())
        fail(ErrorCode::ConfigError, "discretization must be a JSON object");
    }

    if (command == "bands") run_bands(disc, prob, ctx);
    else if (command == "superspace") run_superspace(disc, prob, ctx);
    else if (command == "pwe") run_pwe(disc, prob, ctx);
    else if (command == "trace-scan") run_trace_scan(disc, prob, ctx);
    else if (command == "interface") run_interface(disc, prob, ctx);
    else if (command == "convergence") run_convergence(disc, prob, ctx);
    else run_tiling_info(disc, prob, ctx);

    Json meta;
    meta["version"] = qpspec::kVersion;
    meta["command"] = command;
    meta["defaults_applied"] = ctx.defaults_applied;
    for (const auto& item : ctx.meta_extra.items()) meta[item.key()] = item.value();
    Json effective = ctx.config;
    effective.erase("output");
    for (const auto& item : ctx.defaults_applied.items())
      set_path(effective, item.key(), item.value());
    meta["effective"] = effective;
    ctx.emit("meta.json", meta.dump(2) + "\n");

    for (const auto& [name, content] : ctx.files)
      io::write_file((std::filesystem::path(ctx.out_dir) / name).string(), content);
    return kExitSuccess;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool config_side =
        e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument;
    return config_side ? kExitConfig : kExitNumerical;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_main(int argc, const char* const* argv) {
  CliOptions options;
  CLI::App app{"Spectra of one-dimensional quasiperiodic operators"};
  app.add_option("--config", options.config_path, "JSON run configuration")->required();
  app.add_option("--out", options.out_dir,
                 "output directory (overrides the config's \"output\")");
  app.add_option("--threads", options.threads, "worker thread count");
  app.add_option("--override", options.overrides,
                 "dotted key=value applied onto the config, repeatable");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitSuccess : kExitConfig;
  }
  return run_options(options);
}

}  // namespace qpspec::cli
