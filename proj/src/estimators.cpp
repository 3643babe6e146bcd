#include "sphertess/estimators.hpp"

#include <cmath>
#include <limits>

#include "sphertess/constants.hpp"
#include "sphertess/parallel.hpp"

namespace sphertess {

namespace {

UnitVec origin_of(const SizeSpec& spec, int d) { return spec.origin.value_or(UnitVec::origin(d)); }

bool in_closed_hemisphere(const VPolytope& K, const UnitVec& o) {
  for (const auto& v : K.vertices()) {
    if (v.dot(o) < -1e-12) return false;
  }
  return true;
}

bool is_proper(const HPolytope& P) {
  if (P.is_whole_sphere()) return false;
  return enumerate_vertices(P).line_free;
}

// Results of one replication of a counting experiment.
struct Tally {
  std::uint64_t units = 0;
  std::uint64_t conditioning = 0;
  std::uint64_t joint = 0;
  std::uint64_t undefined = 0;
  std::uint64_t redraws = 0;
};

template <class Result, class Fn>
std::vector<Result> run(std::size_t n, Fn&& fn) {
  std::vector<Result> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

double functional_value(TypicalFunctional f, double a, const HPolytope& P) {
  switch (f) {
    case TypicalFunctional::One: return 1.0;
    case TypicalFunctional::Volume: return *exact_area(P);
    case TypicalFunctional::U1: return U1_exact_2d(P);
    case TypicalFunctional::VolumeIndicator: return *exact_area(P) >= a ? 1.0 : 0.0;
  }
  return 0.0;
}

void require_n(std::size_t n) {
  if (n == 0) throw GeometryError(ErrorKind::OutOfRange, "n must be positive");
}

}  // namespace

Proportion wilson(std::uint64_t successes, std::uint64_t trials, double z) {
  Proportion out;
  out.successes = successes;
  out.trials = trials;
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  out.p = p;
  out.std_error = std::sqrt(p * (1.0 - p) / n);
  out.lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  out.hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return out;
}

MeanEstimate mean_of(const std::vector<double>& values) {
  MeanEstimate m;
  m.n = values.size();
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std_error = std::sqrt(ss / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
  }
  return m;
}

std::string_view to_string(CellModel m) noexcept {
  switch (m) {
    case CellModel::HyperplaneCrofton: return "HyperplaneCrofton";
    case CellModel::HyperplaneTypical: return "HyperplaneTypical";
    case CellModel::VoronoiTypical: return "VoronoiTypical";
  }
  return "?";
}

std::string_view to_string(DeviationKind k) noexcept {
  switch (k) {
    case DeviationKind::Delta2: return "Delta2";
    case DeviationKind::ThetaR: return "ThetaR";
    case DeviationKind::ThetaO: return "ThetaO";
    case DeviationKind::Canonical: return "Canonical";
  }
  return "?";
}

std::optional<CellModel> parse_cell_model(std::string_view name) noexcept {
  for (auto m : {CellModel::HyperplaneCrofton, CellModel::HyperplaneTypical, CellModel::VoronoiTypical}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<DeviationKind> parse_deviation_kind(std::string_view name) noexcept {
  for (auto k : {DeviationKind::Delta2, DeviationKind::ThetaR, DeviationKind::ThetaO, DeviationKind::Canonical}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(TypicalFunctional f) noexcept {
  switch (f) {
    case TypicalFunctional::One: return "one";
    case TypicalFunctional::Volume: return "volume";
    case TypicalFunctional::U1: return "u1";
    case TypicalFunctional::VolumeIndicator: return "volume-indicator";
  }
  return "?";
}

std::optional<TypicalFunctional> parse_typical_functional(std::string_view name) noexcept {
  for (auto f : {TypicalFunctional::One, TypicalFunctional::Volume, TypicalFunctional::U1,
                 TypicalFunctional::VolumeIndicator}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

// ------------------------------------------------------------- per-cell

double size_of(const SizeSpec& spec, const HPolytope& P, const SimulationOptions& opts, std::uint64_t seed) {
  switch (spec.kind) {
    case SizeKind::Volume: return cell_volume(P, opts.volume_samples, seed).value;
    case SizeKind::Inradius: return inradius_free(P).radius;
    case SizeKind::CentredInradius: return centred_inradius(P, origin_of(spec, P.dim()));
  }
  return 0.0;
}

std::optional<double> deviation_of(DeviationKind kind, CellModel model, const SizeSpec& spec, double a,
                                   const HPolytope& P, const SimulationOptions& opts, std::uint64_t seed) {
  const int d = P.dim();
  switch (kind) {
    case DeviationKind::Delta2:
      if (!is_proper(P)) return std::nullopt;
      try {
        return shape_deviation(P, opts.deviation).delta2;
      } catch (const GeometryError& e) {
        if (e.kind() != ErrorKind::Improper) throw;
        return std::nullopt;
      }
    case DeviationKind::ThetaR:
      if (!is_proper(P)) return std::nullopt;
      return theta_r(P);
    case DeviationKind::ThetaO: {
      if (!is_proper(P)) return std::nullopt;
      const UnitVec o = origin_of(spec, d);
      if (min_slack(P, o) < -1e-12) return std::nullopt;
      const VPolytope K = vertices(P);
      if (!in_closed_hemisphere(K, o)) return std::nullopt;
      return centred_circumradius(K, o) - centred_inradius(P, o);
    }
    case DeviationKind::Canonical: {
      if (model == CellModel::VoronoiTypical) {
        if (!is_proper(P)) return std::nullopt;
        const UnitVec o = origin_of(spec, d);
        const VPolytope K = vertices(P);
        if (!in_closed_hemisphere(K, o)) return std::nullopt;
        const double phi = U_tilde(K, o, opts.u1_samples, seed).value / omega(d + 1);
        return canonical_deviation(phi, tau(TauModel::VoronoiInradius, d, a)).value;
      }
      double u1 = 0.5;
      if (d == 2) {
        u1 = U1_exact_2d(P);
      } else if (is_proper(P)) {
        u1 = U1(vertices(P), opts.u1_samples, seed).value;
      }
      return canonical_deviation(2.0 * u1, tau(tau_model_for(spec.kind), d, a)).value;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- draws

CroftonDraw draw_crofton_cell(double gamma_s, const UnitVec& origin, std::uint64_t seed, std::size_t max_resamples) {
  for (std::size_t attempt = 0; attempt <= max_resamples; ++attempt) {
    Rng rng = make_rng(seed, attempt);
    const auto points = sample_poisson(gamma_s, origin.dim(), rng);
    try {
      return {crofton_cell(points, origin), points.size(), attempt};
    } catch (const GeometryError& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
    }
  }
  throw GeometryError(ErrorKind::Degenerate, "degenerate redraw budget exhausted");
}

TessellationDraw draw_tessellation(double gamma_s, std::uint64_t seed, std::size_t max_resamples) {
  for (std::size_t attempt = 0; attempt <= max_resamples; ++attempt) {
    Rng rng = make_rng(seed, attempt);
    const auto points = sample_poisson(gamma_s, 2, rng);
    try {
      return {tessellation_cells(points, 2, derive_seed(seed, attempt + 0x10000)), attempt};
    } catch (const GeometryError& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
    }
  }
  throw GeometryError(ErrorKind::Degenerate, "degenerate redraw budget exhausted");
}

// ---------------------------------------------------------- experiments

ConditionalResult estimate_conditional_deviation(CellModel model, const SizeSpec& size, DeviationKind dev, double a,
                                                 double epsilon, double gamma_s, std::size_t n, std::uint64_t seed,
                                                 const SimulationOptions& opts) {
  require_n(n);
  if (!(a > 0.0)) throw GeometryError(ErrorKind::OutOfRange, "a must be positive");
  if (!(epsilon >= 0.0)) throw GeometryError(ErrorKind::OutOfRange, "epsilon must be nonnegative");
  if (model == CellModel::HyperplaneTypical && opts.d != 2) {
    throw GeometryError(ErrorKind::OutOfRange, "typical hyperplane cells need d = 2");
  }
  if (model == CellModel::VoronoiTypical && dev == DeviationKind::Canonical && size.kind != SizeKind::CentredInradius) {
    throw GeometryError(ErrorKind::OutOfRange, "Voronoi canonical deviation is defined for the centred inradius");
  }
  const int d = opts.d;
  const UnitVec o = origin_of(size, d);

  auto examine = [&](const HPolytope& cell, std::uint64_t s, Tally& t) {
    ++t.units;
    if (size_of(size, cell, opts, derive_seed(s, 1)) < a) return;
    ++t.conditioning;
    const auto value = deviation_of(dev, model, size, a, cell, opts, derive_seed(s, 2));
    if (!value) {
      ++t.undefined;
    } else if (*value >= epsilon) {
      ++t.joint;
    }
  };

  const auto tallies = run<Tally>(n, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    Tally t;
    switch (model) {
      case CellModel::HyperplaneCrofton: {
        const CroftonDraw draw = draw_crofton_cell(gamma_s, o, s, opts.max_resamples);
        t.redraws = draw.redraws;
        examine(draw.cell, s, t);
        break;
      }
      case CellModel::HyperplaneTypical: {
        const TessellationDraw draw = draw_tessellation(gamma_s, s, opts.max_resamples);
        t.redraws = draw.redraws;
        for (std::size_t j = 0; j < draw.tess.cells.size(); ++j) {
          const std::uint64_t sj = derive_seed(s, j + 1);
          Rng rng = make_rng(sj, 0);
          examine(recentre(draw.tess.cells[j], rng), sj, t);
        }
        break;
      }
      case CellModel::VoronoiTypical: {
        Rng rng = make_rng(s, 0);
        examine(voronoi_typical_sample(gamma_s, d, rng).voronoi, s, t);
        break;
      }
    }
    return t;
  });

  ConditionalResult r;
  for (const Tally& t : tallies) {
    r.units += t.units;
    r.conditioning += t.conditioning;
    r.joint += t.joint;
    r.undefined += t.undefined;
    r.redraws += t.redraws;
  }
  const std::uint64_t defined = r.conditioning - r.undefined;
  r.starved = defined == 0;
  r.conditional = wilson(r.joint, defined);
  return r;
}

LowerBoundReport check_zero_cell_lower_bound(const SizeSpec& size, double a, double gamma_s, std::size_t n,
                                             std::uint64_t seed, const SimulationOptions& opts) {
  require_n(n);
  const int d = opts.d;
  const UnitVec o = origin_of(size, d);
  LowerBoundReport r;
  r.tau = tau(tau_model_for(size.kind), d, a);
  r.rhs = std::exp(-gamma_s * omega(d + 1) * r.tau);
  const auto tallies = run<Tally>(n, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const CroftonDraw draw = draw_crofton_cell(gamma_s, o, s, opts.max_resamples);
    Tally t;
    t.redraws = draw.redraws;
    t.joint = size_of(size, draw.cell, opts, derive_seed(s, 1)) >= a ? 1 : 0;
    return t;
  });
  std::uint64_t hits = 0;
  for (const Tally& t : tallies) {
    hits += t.joint;
    r.redraws += t.redraws;
  }
  r.p = wilson(hits, n);
  r.pass = r.p.p + 3.0 * r.p.std_error >= r.rhs;
  return r;
}

RateCurve estimate_rate(const SizeSpec& size, double a, const std::vector<double>& gammas, std::size_t n,
                        std::uint64_t seed, const SimulationOptions& opts) {
  if (gammas.empty()) throw GeometryError(ErrorKind::OutOfRange, "empty gamma grid");
  for (std::size_t g = 1; g < gammas.size(); ++g) {
    if (!(gammas[g] > gammas[g - 1])) throw GeometryError(ErrorKind::OutOfRange, "gamma grid must increase");
  }
  RateCurve curve;
  curve.target = -omega(opts.d + 1) * tau(tau_model_for(size.kind), opts.d, a);
  curve.lower_bounds_hold = true;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const LowerBoundReport lb = check_zero_cell_lower_bound(size, a, gammas[g], n, derive_seed(seed, g), opts);
    RatePoint pt;
    pt.gamma_s = gammas[g];
    pt.p = lb.p;
    pt.log_rate = lb.p.successes > 0 ? std::log(lb.p.p) / gammas[g] : -std::numeric_limits<double>::infinity();
    pt.starved = lb.p.successes < 10;
    pt.lower_bound = lb.rhs;
    pt.lower_bound_holds = lb.pass;
    pt.redraws = lb.redraws;
    curve.lower_bounds_hold = curve.lower_bounds_hold && lb.pass;
    curve.points.push_back(pt);
  }
  curve.decreasing = true;
  const RatePoint* previous = nullptr;
  for (const RatePoint& pt : curve.points) {
    if (pt.starved) continue;
    if (previous && !(pt.log_rate < previous->log_rate)) curve.decreasing = false;
    previous = &pt;
  }
  const RatePoint& last = curve.points.back();
  curve.final_relative_error = std::abs(last.log_rate - curve.target) / std::abs(curve.target);
  return curve;
}

CellCountReport check_cell_count(double gamma_s, std::size_t n, std::uint64_t seed, const SimulationOptions& opts) {
  require_n(n);
  if (opts.d != 2) throw GeometryError(ErrorKind::OutOfRange, "cell counts need d = 2");
  struct Row {
    double count;
    std::uint64_t redraws;
    bool certified;
  };
  const auto rows = run<Row>(n, [&](std::size_t i) {
    const TessellationDraw draw = draw_tessellation(gamma_s, derive_seed(seed, i), opts.max_resamples);
    const int k = static_cast<int>(draw.tess.generators.size());
    const bool ok = draw.tess.cells.size() == schlafli_count(2, k);
    return Row{static_cast<double>(draw.tess.cells.size()), draw.redraws, ok};
  });
  CellCountReport r;
  std::vector<double> counts;
  counts.reserve(n);
  for (const Row& row : rows) {
    counts.push_back(row.count);
    r.redraws += row.redraws;
    r.certificate_failures += row.certified ? 0 : 1;
  }
  r.count = mean_of(counts);
  r.target = h_m(2, gamma_s * omega(3));
  // Integer counts: the sample mean has resolution 1/n.
  const double slack = 3.0 * r.count.std_error + 1.0 / static_cast<double>(n);
  r.pass = std::abs(r.count.mean - r.target) <= slack && r.certificate_failures == 0;
  return r;
}

TypicalIdentityReport check_typical_identity(TypicalFunctional f, double a, double gamma_s, std::size_t n,
                                             std::uint64_t seed, const SimulationOptions& opts) {
  require_n(n);
  if (opts.d != 2) throw GeometryError(ErrorKind::OutOfRange, "typical-cell identity needs d = 2");
  const UnitVec o = UnitVec::origin(2);
  const std::uint64_t left_seed = derive_seed(seed, 0);
  const std::uint64_t right_seed = derive_seed(seed, 1);
  struct Row {
    double value;
    std::uint64_t redraws;
  };
  const auto left = run<Row>(n, [&](std::size_t i) {
    const CroftonDraw draw = draw_crofton_cell(gamma_s, o, derive_seed(left_seed, i), opts.max_resamples);
    return Row{functional_value(f, a, draw.cell), draw.redraws};
  });
  const auto right = run<Row>(n, [&](std::size_t i) {
    const TessellationDraw draw = draw_tessellation(gamma_s, derive_seed(right_seed, i), opts.max_resamples);
    double sum = 0.0;
    for (const auto& cell : draw.tess.cells) sum += functional_value(f, a, cell) * *exact_area(cell);
    return Row{sum / omega(3), draw.redraws};
  });
  TypicalIdentityReport r;
  std::vector<double> lv, rv;
  lv.reserve(n);
  rv.reserve(n);
  for (const Row& row : left) {
    lv.push_back(row.value);
    r.redraws += row.redraws;
  }
  for (const Row& row : right) {
    rv.push_back(row.value);
    r.redraws += row.redraws;
  }
  r.lhs = mean_of(lv);
  r.rhs = mean_of(rv);
  const double se = std::sqrt(r.lhs.std_error * r.lhs.std_error + r.rhs.std_error * r.rhs.std_error);
  // The f = 1 sides are deterministic up to rounding.
  r.pass = std::abs(r.lhs.mean - r.rhs.mean) <= 3.0 * se + 1e-9;
  return r;
}

VoronoiTailReport check_voronoi_tail(double a, double gamma_s, int d, std::size_t n, std::uint64_t seed) {
  require_n(n);
  if (!(a > 0.0 && a < kHalfPi)) throw GeometryError(ErrorKind::OutOfRange, "a must lie in (0, pi/2)");
  const UnitVec o = UnitVec::origin(d);
  const auto hits = run<std::uint8_t>(n, [&](std::size_t i) -> std::uint8_t {
    Rng rng = make_rng(seed, i);
    const HPolytope cell = voronoi_typical_sample(gamma_s, d, rng).voronoi;
    return centred_inradius(cell, o) >= a ? 1 : 0;
  });
  std::uint64_t s = 0;
  for (auto h : hits) s += h;
  VoronoiTailReport r;
  r.p = wilson(s, n);
  r.band = wilson(s, n, 3.0);
  r.target = std::exp(-gamma_s * cap_volume(d, 2.0 * a));
  r.pass = r.target >= r.band.lo && r.target <= r.band.hi;
  return r;
}

BisectorIdentityReport check_bisector_identity(double gamma_s, int d, std::size_t n, std::uint64_t seed, double tol) {
  require_n(n);
  const auto dist = run<double>(n, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    const VoronoiTypicalSample s = voronoi_typical_sample(gamma_s, d, rng);
    return normal_set_distance(s.voronoi, s.bisector);
  });
  BisectorIdentityReport r;
  r.realizations = n;
  for (double v : dist) {
    r.worst = std::max(r.worst, v);
    if (!(v <= tol)) ++r.mismatches;
  }
  return r;
}

}  // namespace sphertess
