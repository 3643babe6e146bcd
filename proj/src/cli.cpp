#include "sphertess/cli.hpp"

#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "sphertess/constants.hpp"
#include "sphertess/estimators.hpp"
#include "sphertess/io.hpp"
#include "sphertess/parallel.hpp"

namespace sphertess::cli {

namespace {

using nlohmann::json;

const std::map<std::string, std::vector<std::string>>& columns() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"simulate-crofton",
       {"index", "points", "facets", "vertices", "proper", "volume", "u1", "inradius", "centred_inradius", "theta_r"}},
      {"simulate-voronoi-typical",
       {"index", "points", "facets", "vertices", "volume", "centred_inradius", "centred_circumradius",
        "bisector_distance"}},
      {"tessellate", {"realization", "generators", "cell", "facets", "volume"}},
      {"verify-urysohn", {"body_id", "kind", "lhs", "lhs_se", "rhs", "rhs_se", "verdict"}},
      {"verify-stability", {"body_id", "kind", "lhs", "lhs_se", "rhs", "rhs_se", "verdict"}},
      {"check-cell-count", {"gamma_s", "n", "mean", "stderr", "target", "redraws", "pass"}},
      {"check-typical-identity", {"functional", "gamma_s", "n", "lhs", "lhs_se", "rhs", "rhs_se", "pass"}},
      {"check-voronoi-tail", {"a", "gamma_s", "n", "successes", "p", "ci_lo", "ci_hi", "band_lo", "band_hi", "target", "pass"}},
      {"check-lower-bound", {"size", "a", "gamma_s", "n", "successes", "p", "stderr", "rhs", "pass"}},
      {"estimate-rate",
       {"gamma_s", "n", "successes", "p", "ci_lo", "ci_hi", "log_rate", "starved", "lower_bound", "lower_bound_holds"}},
      {"estimate-conditional",
       {"model", "deviation", "a", "epsilon", "gamma_s", "units", "conditioning", "joint", "undefined", "p", "ci_lo",
        "ci_hi", "starved"}},
      {"constants", {"name", "d", "x", "y", "value"}},
  };
  return table;
}

const std::set<std::string> kTopKeys{"command", "d",    "gamma_s",   "gamma",      "model",    "size",
                                     "a",       "epsilon", "alpha0", "kind",       "deviation", "functional",
                                     "n",       "seed", "mc",        "output"};
const std::set<std::string> kMcKeys{"volume_samples", "u1_samples", "delta2_grid"};
const std::set<std::string> kSizeKeys{"kind", "origin"};

std::string fd(double v) { return format_double(v); }
std::string fb(bool b) { return b ? "true" : "false"; }
std::string fu(std::uint64_t v) { return std::to_string(v); }

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "expected a finite number");
  return v;
}

std::uint64_t count(const json& j, const std::string& key, std::uint64_t lo, std::uint64_t hi) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v < lo || v > hi) throw ConfigError(key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  const auto v = j.get<std::int64_t>();
  if (v < 0 || static_cast<std::uint64_t>(v) < lo || static_cast<std::uint64_t>(v) > hi) {
    throw ConfigError(key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<std::uint64_t>(v);
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "expected a string");
  return j.get<std::string>();
}

template <class T>
const T& require(const std::optional<T>& v, const std::string& key) {
  if (!v) throw ConfigError(key, "required by this command");
  return *v;
}

void require_d2(const ExperimentConfig& c) {
  if (c.d != 2) throw ConfigError("d", "this command is implemented for d = 2");
}

void require_radius(const ExperimentConfig& c, const std::string& key = "a") {
  const double a = require(c.a, key);
  if (!(a > 0.0 && a < kHalfPi)) throw ConfigError(key, "must lie in (0, pi/2)");
}

void validate_size_threshold(const ExperimentConfig& c) {
  const double a = require(c.a, "a");
  if (c.size.kind == SizeKind::Volume) {
    if (!(a > 0.0 && a <= omega(c.d + 1))) throw ConfigError("a", "volume threshold must lie in (0, omega_{d+1}]");
  } else if (!(a > 0.0 && a <= kHalfPi)) {
    throw ConfigError("a", "radius threshold must lie in (0, pi/2]");
  }
}

// Constraints touched by at least d vertices.
std::size_t active_facets(const HPolytope& P, const std::vector<UnitVec>& vertices, bool proper) {
  if (!proper) return P.size();
  std::size_t count = 0;
  for (const auto& n : P.normals()) {
    int tight = 0;
    for (const auto& v : vertices) tight += std::abs(v.dot(n)) < 1e-9 ? 1 : 0;
    if (tight >= P.dim()) ++count;
  }
  return count;
}

SimulationOptions sim_options(const ExperimentConfig& c) {
  SimulationOptions o;
  o.d = c.d;
  o.volume_samples = c.volume_samples;
  o.u1_samples = c.u1_samples;
  o.deviation.grid = c.delta2_grid;
  o.deviation.seed = derive_seed(c.seed, 0xde17a);
  return o;
}

// ------------------------------------------------------------- commands

RunResult simulate_crofton(const ExperimentConfig& c) {
  const double gamma = require(c.gamma_s, "gamma_s");
  const SimulationOptions opts = sim_options(c);
  const UnitVec o = UnitVec::origin(c.d);
  struct Row {
    std::vector<std::string> cells;
    double volume;
    std::size_t redraws;
    bool proper;
  };
  std::vector<Row> rows(c.n);
  parallel_for(c.n, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(c.seed, i);
    const CroftonDraw draw = draw_crofton_cell(gamma, o, s, opts.max_resamples);
    const HPolytope& P = draw.cell;
    const VertexEnumeration ve = P.is_whole_sphere() ? VertexEnumeration{} : enumerate_vertices(P);
    const bool proper = !P.is_whole_sphere() && ve.line_free;
    const double vol = cell_volume(P, opts.volume_samples, derive_seed(s, 1)).value;
    double u1 = 0.5;
    if (proper) u1 = c.d == 2 ? U1_exact_2d(P) : U1(VPolytope(c.d, ve.vertices), opts.u1_samples, derive_seed(s, 2)).value;
    const double inr = inradius_free(P).radius;
    const double cinr = centred_inradius(P, o);
    const std::string thr = proper ? fd(theta_r(P)) : "";
    rows[i] = {{fu(i), fu(draw.points), fu(active_facets(P, ve.vertices, proper)), fu(ve.vertices.size()), fb(proper), fd(vol), fd(u1), fd(inr),
                fd(cinr), thr},
               vol,
               draw.redraws,
               proper};
  });
  CsvTable table(columns().at(c.command));
  std::vector<double> vols;
  std::size_t redraws = 0, proper = 0;
  for (auto& r : rows) {
    table.add_row(std::move(r.cells));
    vols.push_back(r.volume);
    redraws += r.redraws;
    proper += r.proper ? 1 : 0;
  }
  RunResult out;
  out.results = {{"cells", c.n}, {"proper_cells", proper}, {"mean_volume", to_json(mean_of(vols))}, {"redraws", redraws}};
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  if (redraws > c.n / 100 + 1) out.exit_code = kDegenerate;
  return out;
}

RunResult simulate_voronoi(const ExperimentConfig& c) {
  const double gamma = require(c.gamma_s, "gamma_s");
  const UnitVec o = UnitVec::origin(c.d);
  const SimulationOptions opts = sim_options(c);
  std::vector<std::vector<std::string>> rows(c.n);
  std::vector<double> radii(c.n);
  std::vector<std::uint8_t> matched(c.n);
  parallel_for(c.n, [&](std::size_t i) {
    Rng rng = make_rng(c.seed, i);
    const VoronoiTypicalSample s = voronoi_typical_sample(gamma, c.d, rng);
    const HPolytope& P = s.voronoi;
    const VertexEnumeration ve = P.is_whole_sphere() ? VertexEnumeration{} : enumerate_vertices(P);
    const bool proper = !P.is_whole_sphere() && ve.line_free;
    const double vol = cell_volume(P, opts.volume_samples, derive_seed(c.seed, i) ^ 1).value;
    const double r = centred_inradius(P, o);
    std::string R;
    if (proper) {
      const VPolytope K(c.d, ve.vertices);
      bool hemi = true;
      for (const auto& v : K.vertices()) hemi = hemi && v.dot(o) >= -1e-12;
      if (hemi) R = fd(centred_circumradius(K, o));
    }
    const double dist = normal_set_distance(s.voronoi, s.bisector);
    radii[i] = r;
    matched[i] = dist <= 1e-10 ? 1 : 0;
    rows[i] = {fu(i), fu(s.points.size()), fu(active_facets(P, ve.vertices, proper)), fu(ve.vertices.size()), fd(vol), fd(r), R, fd(dist)};
  });
  CsvTable table(columns().at(c.command));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    table.add_row(std::move(rows[i]));
    mismatches += matched[i] ? 0 : 1;
  }
  RunResult out;
  out.results = {{"cells", c.n}, {"mean_centred_inradius", to_json(mean_of(radii))}, {"bisector_mismatches", mismatches}};
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult tessellate(const ExperimentConfig& c) {
  require_d2(c);
  const double gamma = require(c.gamma_s, "gamma_s");
  CsvTable table(columns().at(c.command));
  json realizations = json::array();
  std::size_t redraws = 0;
  bool partition_ok = true;
  for (std::size_t i = 0; i < c.n; ++i) {
    const TessellationDraw draw = draw_tessellation(gamma, derive_seed(c.seed, i), 64);
    redraws += draw.redraws;
    double total = 0.0;
    for (std::size_t j = 0; j < draw.tess.cells.size(); ++j) {
      const HPolytope& cell = draw.tess.cells[j];
      const double vol = *exact_area(cell);
      std::size_t facets = cell.size();
      if (!cell.is_whole_sphere()) {
        const VertexEnumeration ve = enumerate_vertices(cell);
        facets = active_facets(cell, ve.vertices, ve.line_free);
      }
      total += vol;
      table.add_row({fu(i), fu(draw.tess.generators.size()), fu(j), fu(facets), fd(vol)});
    }
    partition_ok = partition_ok && std::abs(total - 4.0 * kPi) < 1e-8;
    if (i < 10) realizations.push_back(to_json(draw.tess));
  }
  RunResult out;
  out.results = {{"realizations", c.n}, {"redraws", redraws}, {"partition_ok", partition_ok},
                 {"first_realizations", realizations}};
  out.pass = partition_ok;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

json verdict_counts(const std::vector<std::optional<StabilityReport>>& reports, std::size_t& violations) {
  std::map<std::string, std::size_t> counts;
  violations = 0;
  std::size_t skipped = 0;
  for (const auto& r : reports) {
    if (!r) {
      ++skipped;
      continue;
    }
    ++counts[std::string(to_string(r->verdict))];
    if (r->verdict == Verdict::Violated) ++violations;
  }
  json j = counts;
  j["skipped"] = skipped;
  return j;
}

RunResult verify(const ExperimentConfig& c, std::optional<StabilityKind> kind) {
  const double gamma = require(c.gamma_s, "gamma_s");
  const SimulationOptions opts = sim_options(c);
  const UnitVec o = UnitVec::origin(c.d);
  std::vector<std::optional<StabilityReport>> reports(c.n);
  std::vector<std::string> skip_reason(c.n);
  parallel_for(c.n, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(c.seed, i);
    HPolytope P(c.d);
    std::string id;
    if (kind == StabilityKind::VoronoiThetaO) {
      Rng rng = make_rng(s, 0);
      P = voronoi_typical_sample(gamma, c.d, rng).voronoi;
      id = "voronoi-" + std::to_string(i);
    } else {
      P = draw_crofton_cell(gamma, o, s, opts.max_resamples).cell;
      id = "crofton-" + std::to_string(i);
    }
    if (P.is_whole_sphere() || !enumerate_vertices(P).line_free) {
      skip_reason[i] = "improper";
      return;
    }
    const std::size_t samples = c.u1_samples;
    try {
      if (!kind) {
        reports[i] = verify_urysohn(P, samples, derive_seed(s, 3), id);
      } else {
        StabilityParams params;
        params.a = c.a;
        params.epsilon = c.epsilon;
        params.alpha0 = c.alpha0;
        params.body_id = id;
        params.deviation = opts.deviation;
        reports[i] = verify_stability(*kind, P, params, samples, derive_seed(s, 3));
      }
    } catch (const GeometryError& e) {
      if (e.kind() != ErrorKind::PreconditionFailed) throw;
      skip_reason[i] = "precondition";
    }
  });
  CsvTable table(columns().at(c.command));
  for (const auto& r : reports) {
    if (!r) continue;
    table.add_row({r->body_id, r->kind, fd(r->lhs.value), fd(r->lhs.std_error), fd(r->rhs.value), fd(r->rhs.std_error),
                   std::string(to_string(r->verdict))});
  }
  std::size_t violations = 0;
  RunResult out;
  out.results = {{"bodies", c.n}, {"verdicts", verdict_counts(reports, violations)}};
  std::size_t improper = 0, precondition = 0;
  for (const auto& s : skip_reason) {
    improper += s == "improper";
    precondition += s == "precondition";
  }
  out.results["skipped_improper"] = improper;
  out.results["skipped_precondition"] = precondition;
  out.results["violations"] = violations;
  if (kind) out.results["kind"] = std::string(to_string(*kind));
  out.pass = violations == 0;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult cell_count(const ExperimentConfig& c) {
  require_d2(c);
  const double gamma = require(c.gamma_s, "gamma_s");
  const CellCountReport r = check_cell_count(gamma, c.n, c.seed, sim_options(c));
  CsvTable table(columns().at(c.command));
  table.add_row({fd(gamma), fu(c.n), fd(r.count.mean), fd(r.count.std_error), fd(r.target), fu(r.redraws), fb(r.pass)});
  RunResult out;
  out.results = {{"count", to_json(r.count)},
                 {"target", r.target},
                 {"redraws", r.redraws},
                 {"certificate_failures", r.certificate_failures}};
  out.pass = r.pass;
  if (r.redraws > c.n / 100) out.exit_code = kDegenerate;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult typical_identity(const ExperimentConfig& c) {
  require_d2(c);
  const double gamma = require(c.gamma_s, "gamma_s");
  const std::string name = require(c.functional, "functional");
  const auto f = parse_typical_functional(name);
  if (!f) throw ConfigError("functional", "expected one of one, volume, u1, volume-indicator");
  double a = 0.0;
  if (*f == TypicalFunctional::VolumeIndicator) {
    a = require(c.a, "a");
    if (!(a > 0.0 && a <= 4.0 * kPi)) throw ConfigError("a", "volume threshold must lie in (0, 4 pi]");
  }
  const TypicalIdentityReport r = check_typical_identity(*f, a, gamma, c.n, c.seed, sim_options(c));
  CsvTable table(columns().at(c.command));
  table.add_row({name, fd(gamma), fu(c.n), fd(r.lhs.mean), fd(r.lhs.std_error), fd(r.rhs.mean), fd(r.rhs.std_error),
                 fb(r.pass)});
  RunResult out;
  out.results = {{"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)}, {"redraws", r.redraws}};
  out.pass = r.pass;
  if (r.redraws > c.n / 50) out.exit_code = kDegenerate;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult voronoi_tail(const ExperimentConfig& c) {
  require_radius(c);
  const double gamma = require(c.gamma_s, "gamma_s");
  const VoronoiTailReport r = check_voronoi_tail(*c.a, gamma, c.d, c.n, c.seed);
  CsvTable table(columns().at(c.command));
  table.add_row({fd(*c.a), fd(gamma), fu(c.n), fu(r.p.successes), fd(r.p.p), fd(r.p.lo), fd(r.p.hi), fd(r.band.lo),
                 fd(r.band.hi), fd(r.target), fb(r.pass)});
  RunResult out;
  out.results = {{"p", to_json(r.p)}, {"band", to_json(r.band)}, {"target", r.target}};
  out.pass = r.pass;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult lower_bound(const ExperimentConfig& c) {
  if (!c.size_given) throw ConfigError("size", "required by this command");
  validate_size_threshold(c);
  const double gamma = require(c.gamma_s, "gamma_s");
  const LowerBoundReport r = check_zero_cell_lower_bound(c.size, *c.a, gamma, c.n, c.seed, sim_options(c));
  CsvTable table(columns().at(c.command));
  table.add_row({std::string(to_string(c.size.kind)), fd(*c.a), fd(gamma), fu(c.n), fu(r.p.successes), fd(r.p.p),
                 fd(r.p.std_error), fd(r.rhs), fb(r.pass)});
  RunResult out;
  out.results = {{"p", to_json(r.p)}, {"rhs", r.rhs}, {"tau", r.tau}, {"redraws", r.redraws}};
  out.pass = r.pass;
  if (r.redraws > c.n / 100 + 1) out.exit_code = kDegenerate;
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult rate(const ExperimentConfig& c) {
  if (!c.size_given) throw ConfigError("size", "required by this command");
  validate_size_threshold(c);
  if (c.gamma.empty()) throw ConfigError("gamma", "required by this command");
  const RateCurve curve = estimate_rate(c.size, *c.a, c.gamma, c.n, c.seed, sim_options(c));
  CsvTable table(columns().at(c.command));
  json points = json::array();
  for (const RatePoint& p : curve.points) {
    table.add_row({fd(p.gamma_s), fu(c.n), fu(p.p.successes), fd(p.p.p), fd(p.p.lo), fd(p.p.hi), fd(p.log_rate),
                   fb(p.starved), fd(p.lower_bound), fb(p.lower_bound_holds)});
    points.push_back({{"gamma_s", p.gamma_s},
                      {"p", to_json(p.p)},
                      {"log_rate", fd(p.log_rate)},
                      {"starved", p.starved},
                      {"lower_bound", p.lower_bound},
                      {"lower_bound_holds", p.lower_bound_holds}});
  }
  RunResult out;
  out.results = {{"points", points},
                 {"target", curve.target},
                 {"decreasing", curve.decreasing},
                 {"lower_bounds_hold", curve.lower_bounds_hold},
                 {"final_relative_error", curve.final_relative_error},
                 {"note", "upper bounds with non-constructive constants are checked qualitatively only"}};
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult conditional(const ExperimentConfig& c) {
  const auto model = parse_cell_model(require(c.model, "model"));
  if (!model) throw ConfigError("model", "expected HyperplaneCrofton, HyperplaneTypical or VoronoiTypical");
  const auto dev = parse_deviation_kind(require(c.deviation, "deviation"));
  if (!dev) throw ConfigError("deviation", "expected Delta2, ThetaR, ThetaO or Canonical");
  if (!c.size_given) throw ConfigError("size", "required by this command");
  validate_size_threshold(c);
  const double eps = require(c.epsilon, "epsilon");
  if (eps < 0.0) throw ConfigError("epsilon", "must be nonnegative");
  if (*model == CellModel::HyperplaneTypical) require_d2(c);
  if ((*dev == DeviationKind::Delta2) && c.d > 3) throw ConfigError("d", "Delta2 is implemented for d = 2 and d = 3");
  const double gamma = require(c.gamma_s, "gamma_s");
  const ConditionalResult r =
      estimate_conditional_deviation(*model, c.size, *dev, *c.a, eps, gamma, c.n, c.seed, sim_options(c));
  CsvTable table(columns().at(c.command));
  table.add_row({std::string(to_string(*model)), std::string(to_string(*dev)), fd(*c.a), fd(eps), fd(gamma),
                 fu(r.units), fu(r.conditioning), fu(r.joint), fu(r.undefined), fd(r.conditional.p),
                 fd(r.conditional.lo), fd(r.conditional.hi), fb(r.starved)});
  RunResult out;
  out.results = {{"conditional", to_json(r.conditional)},
                 {"units", r.units},
                 {"conditioning", r.conditioning},
                 {"joint", r.joint},
                 {"undefined", r.undefined},
                 {"redraws", r.redraws},
                 {"starved", r.starved}};
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

RunResult constants_table(const ExperimentConfig& c) {
  const int d = c.d;
  CsvTable table(columns().at(c.command));
  auto row = [&](const std::string& name, double x, double y, double v) {
    table.add_row({name, std::to_string(d), fd(x), fd(y), fd(v)});
  };
  for (double ac : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4}) {
    for (double a0 : {0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4}) {
      if (a0 > ac) continue;
      row("beta", a0, ac, beta_stability(a0, ac, d));
      row("beta_bound", a0, ac, beta_stability_bound(a0, ac, d));
    }
  }
  for (double a : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5}) {
    row("c_inradius", a, 0.0, c_inradius(a, d));
    row("c_inradius_bound", a, 0.0, c_inradius_bound(a, d));
    row("c_voronoi", a, 0.0, c_voronoi(a, d));
  }
  const double half = 0.5 * omega(d + 1);
  for (double frac : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.95}) row("beta_bar", frac * half, 0.0, beta_bar(frac * half, d));
  for (int m = 0; m <= 8; ++m) {
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) row("h_m", m, t, h_m(m, t));
  }
  for (int k = 0; k <= 10; ++k) row("schlafli", k, 0.0, static_cast<double>(schlafli_count(d, k)));
  RunResult out;
  out.results = {{"d", d}, {"rows", table.rows()}};
  if (c.a) {
    const double a = *c.a;
    if (a > 0.0 && a < kHalfPi) {
      out.results["c_inradius"] = c_inradius(a, d);
      out.results["c_voronoi"] = c_voronoi(a, d);
    }
    if (a > 0.0 && a < half) out.results["beta_bar"] = beta_bar(a, d);
  }
  out.csv_body = table.body();
  out.csv_rows = table.rows();
  return out;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json versions() {
  return {{"sphertess", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"compiler", __VERSION__}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "simulate-crofton",   "simulate-voronoi-typical", "tessellate",        "verify-urysohn",
      "verify-stability",   "check-cell-count",         "check-typical-identity", "check-voronoi-tail",
      "check-lower-bound",  "estimate-rate",            "estimate-conditional",   "constants"};
  return names;
}

std::string columns_help() {
  std::string out = "CSV columns per command:\n";
  for (const auto& name : subcommands()) {
    out += "  " + name + ": ";
    const auto& cols = columns().at(name);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
  }
  return out;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kTopKeys.count(key)) throw ConfigError(key, "unknown key");
  }
  ExperimentConfig c;
  c.raw = j;
  if (!j.contains("command")) throw ConfigError("command", "missing");
  c.command = text(j["command"], "command");
  if (!columns().count(c.command)) throw ConfigError("command", "unknown command '" + c.command + "'");

  if (j.contains("d")) c.d = static_cast<int>(count(j["d"], "d", 2, 8));
  if (j.contains("gamma_s")) {
    c.gamma_s = number(j["gamma_s"], "gamma_s");
    if (!(*c.gamma_s > 0.0)) throw ConfigError("gamma_s", "must be positive");
  }
  if (j.contains("gamma")) {
    if (!j["gamma"].is_array() || j["gamma"].empty()) throw ConfigError("gamma", "expected a nonempty array");
    for (std::size_t i = 0; i < j["gamma"].size(); ++i) {
      const std::string key = "gamma[" + std::to_string(i) + "]";
      const double g = number(j["gamma"][i], key);
      if (!(g > 0.0)) throw ConfigError(key, "must be positive");
      if (!c.gamma.empty() && !(g > c.gamma.back())) throw ConfigError(key, "grid must be strictly increasing");
      c.gamma.push_back(g);
    }
  }
  if (j.contains("model")) c.model = text(j["model"], "model");
  if (j.contains("kind")) c.kind = text(j["kind"], "kind");
  if (j.contains("deviation")) c.deviation = text(j["deviation"], "deviation");
  if (j.contains("functional")) c.functional = text(j["functional"], "functional");
  if (j.contains("a")) c.a = number(j["a"], "a");
  if (j.contains("epsilon")) {
    c.epsilon = number(j["epsilon"], "epsilon");
    if (*c.epsilon < 0.0) throw ConfigError("epsilon", "must be nonnegative");
  }
  if (j.contains("alpha0")) {
    c.alpha0 = number(j["alpha0"], "alpha0");
    if (!(*c.alpha0 > 0.0 && *c.alpha0 < kHalfPi)) throw ConfigError("alpha0", "must lie in (0, pi/2)");
  }
  if (j.contains("size")) {
    const json& s = j["size"];
    if (!s.is_object()) throw ConfigError("size", "expected an object");
    for (const auto& [key, value] : s.items()) {
      if (!kSizeKeys.count(key)) throw ConfigError("size." + key, "unknown key");
    }
    if (!s.contains("kind")) throw ConfigError("size.kind", "missing");
    const auto kind = parse_size_kind(text(s["kind"], "size.kind"));
    if (!kind) throw ConfigError("size.kind", "expected volume, inradius or centred-inradius");
    c.size.kind = *kind;
    if (s.contains("origin")) {
      try {
        c.size.origin = unit_vec_from_json(s["origin"]);
      } catch (const std::exception& e) {
        throw ConfigError("size.origin", e.what());
      }
      if (c.size.origin->dim() != c.d) throw ConfigError("size.origin", "needs d + 1 coordinates");
      if (*c.size.origin->coords().data() != 1.0 || c.size.origin->coords().tail(c.d).norm() != 0.0) {
        throw ConfigError("size.origin", "cells are generated around the spherical origin (1, 0, ..., 0)");
      }
    }
    if (c.size.kind == SizeKind::CentredInradius && !c.size.origin) c.size.origin = UnitVec::origin(c.d);
    c.size_given = true;
  }
  if (j.contains("n")) c.n = count(j["n"], "n", 1, 1'000'000'000);
  if (j.contains("seed")) c.seed = count(j["seed"], "seed", 0, std::numeric_limits<std::uint64_t>::max());
  if (j.contains("mc")) {
    const json& m = j["mc"];
    if (!m.is_object()) throw ConfigError("mc", "expected an object");
    for (const auto& [key, value] : m.items()) {
      if (!kMcKeys.count(key)) throw ConfigError("mc." + key, "unknown key");
    }
    if (m.contains("volume_samples")) c.volume_samples = count(m["volume_samples"], "mc.volume_samples", 1, 1'000'000'000);
    if (m.contains("u1_samples")) c.u1_samples = count(m["u1_samples"], "mc.u1_samples", 0, 1'000'000'000);
    if (m.contains("delta2_grid")) c.delta2_grid = static_cast<int>(count(m["delta2_grid"], "mc.delta2_grid", 16, 1 << 16));
  }
  if (j.contains("output")) {
    c.output = text(j["output"], "output");
    if (c.output.empty()) throw ConfigError("output", "must not be empty");
  } else {
    c.output = c.command;
  }
  if (c.command != "constants" && c.n == 0) throw ConfigError("n", "required by this command");
  if (c.command == "verify-stability") {
    if (!parse_stability_kind(require(c.kind, "kind"))) {
      throw ConfigError("kind", "expected VolumeDelta2, InradiusThetaR or VoronoiThetaO");
    }
  }
  return c;
}

RunResult execute(const ExperimentConfig& c) {
  if (c.command == "simulate-crofton") return simulate_crofton(c);
  if (c.command == "simulate-voronoi-typical") return simulate_voronoi(c);
  if (c.command == "tessellate") return tessellate(c);
  if (c.command == "verify-urysohn") {
    if (c.u1_samples == 0) require_d2(c);
    return verify(c, std::nullopt);
  }
  if (c.command == "verify-stability") {
    const StabilityKind kind = *parse_stability_kind(*c.kind);
    if (kind == StabilityKind::VoronoiThetaO && c.u1_samples == 0) throw ConfigError("mc.u1_samples", "must be positive");
    if (kind == StabilityKind::VolumeDelta2 && c.d > 3) throw ConfigError("d", "Delta2 is implemented for d = 2 and d = 3");
    if (c.u1_samples == 0) require_d2(c);
    if (c.a && !(*c.a > 0.0 && *c.a < kHalfPi) && kind != StabilityKind::VolumeDelta2) {
      throw ConfigError("a", "must lie in (0, pi/2)");
    }
    return verify(c, kind);
  }
  if (c.command == "check-cell-count") return cell_count(c);
  if (c.command == "check-typical-identity") return typical_identity(c);
  if (c.command == "check-voronoi-tail") return voronoi_tail(c);
  if (c.command == "check-lower-bound") return lower_bound(c);
  if (c.command == "estimate-rate") return rate(c);
  if (c.command == "estimate-conditional") return conditional(c);
  if (c.command == "constants") return constants_table(c);
  throw ConfigError("command", "unknown command '" + c.command + "'");
}

int run_file(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("<file>", "cannot open " + config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    config = parse_config(j);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  out << "sphertess " << kVersion << " command=" << config.command << " seed=" << config.seed
      << " threads=" << thread_count() << "\n";
  RunResult result;
  try {
    result = execute(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::Degenerate) return kDegenerate;
    if (e.kind() == ErrorKind::OutOfRange) return kConfigError;
    return kVerificationFailed;
  }

  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string csv_path = config.output + ".rows.csv";
  const std::string summary_path = config.output + ".summary.json";
  const std::string digest = sha256_hex(result.csv_body);
  {
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "# generated " << timestamp() << "\n" << result.csv_body;
    if (!csv) {
      err << "error: cannot write " << csv_path << "\n";
      return kVerificationFailed;
    }
  }
  int code = result.exit_code;
  if (code == kOk && result.pass && !*result.pass) code = kVerificationFailed;
  json summary{{"command", config.command},
               {"config", config.raw},
               {"seed", config.seed},
               {"versions", versions()},
               {"threads", thread_count()},
               {"results", result.results},
               {"pass", result.pass ? json(*result.pass) : json(nullptr)},
               {"exit_code", code},
               {"runtime_seconds", runtime},
               {"csv", {{"path", csv_path}, {"rows", result.csv_rows}, {"sha256", digest}}}};
  {
    std::ofstream js(summary_path);
    js << summary.dump(2) << "\n";
    if (!js) {
      err << "error: cannot write " << summary_path << "\n";
      return kVerificationFailed;
    }
  }
  out << "wrote " << csv_path << " (" << result.csv_rows << " rows, sha256 " << digest << ")\n";
  out << "wrote " << summary_path << "\n";
  if (result.pass) out << "pass: " << (*result.pass ? "true" : "false") << "\n";
  return code;
}

}  // namespace sphertess::cli
