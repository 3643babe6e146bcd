#include "sphertess/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nelder_mead.hpp"
#include "sphertess/linalg.hpp"
#include "sphertess/parallel.hpp"

namespace sphertess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Estimate fraction_estimate(std::uint64_t hits, std::size_t n, double scale, std::uint64_t seed) {
  if (n == 0) throw GeometryError(ErrorKind::OutOfRange, "sample count must be positive");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {scale * p, scale * se, n, seed};
}

// Van Oosterom-Strackee solid angle of the triangle (a, b, c).
double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

int normal_rank(const HPolytope& P) {
  if (P.is_whole_sphere()) return 0;
  Eigen::FullPivLU<Mat> lu(P.normal_matrix());
  lu.setThreshold(1e-12);
  return static_cast<int>(lu.rank());
}

// Area of a rank-2 body: a lune whose dihedral angle is pi minus the angular
// spread of the normals in their common plane.
double lune_area(const HPolytope& P) {
  const auto& ns = P.normals();
  const Vec b1 = ns.front().coords();
  Vec b2;
  double best = 0.0;
  for (const auto& n : ns) {
    Vec t = n.coords() - n.coords().dot(b1) * b1;
    if (t.norm() > best) {
      best = t.norm();
      b2 = t / best;
    }
  }
  std::vector<double> angles;
  angles.reserve(ns.size());
  for (const auto& n : ns) angles.push_back(std::atan2(n.coords().dot(b2), n.coords().dot(b1)));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * kPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  const double spread = 2.0 * kPi - gap;
  return 2.0 * std::max(0.0, kPi - spread);
}

// Fibonacci nodes on S^2 or a uniform angular grid on S^1, as columns.
Mat tangent_nodes(int d, int count) {
  if (count < 3) throw GeometryError(ErrorKind::OutOfRange, "deviation grid needs at least 3 nodes");
  Mat nodes(d, count);
  if (d == 2) {
    for (int k = 0; k < count; ++k) {
      const double phi = 2.0 * kPi * (k + 0.5) / count;
      nodes(0, k) = std::cos(phi);
      nodes(1, k) = std::sin(phi);
    }
  } else if (d == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      nodes(0, k) = r * std::cos(golden * k);
      nodes(1, k) = r * std::sin(golden * k);
      nodes(2, k) = z;
    }
  } else {
    throw GeometryError(ErrorKind::OutOfRange, "deviation functionals are implemented for d = 2 and d = 3");
  }
  return nodes;
}

// Cached data of a proper body for repeated evaluation at many centres.
struct Body {
  int d = 0;
  Mat N;                      // normals as columns
  Mat V;                      // vertices as columns
  std::optional<UnitVec> anchor;
  Mat nodes;                  // tangent grid
  std::vector<UnitVec> ring;  // d = 2: vertices in cyclic order
  Mat fk_points;              // d = 3: uniform points of the body
  double fk_scale = 0.0;
};

Body make_body(const HPolytope& P, const DeviationOptions& opts, bool need_fk) {
  if (P.is_whole_sphere()) throw GeometryError(ErrorKind::Improper, "the whole sphere has no radial representation");
  const VertexEnumeration ve = enumerate_vertices(P);
  if (!ve.line_free || ve.vertices.empty()) throw GeometryError(ErrorKind::Improper, "body is not proper");
  Body b;
  b.d = P.dim();
  b.N = P.normal_matrix();
  b.V.resize(b.d + 1, static_cast<Eigen::Index>(ve.vertices.size()));
  for (std::size_t j = 0; j < ve.vertices.size(); ++j) b.V.col(static_cast<Eigen::Index>(j)) = ve.vertices[j].coords();
  b.anchor = ve.vertices.front();
  b.nodes = tangent_nodes(b.d, opts.grid);
  if (need_fk) {
    if (b.d == 2) {
      b.ring = cyclic_order(ve.vertices);
    } else {
      const std::size_t n = opts.fk_samples;
      Rng rng = make_rng(opts.seed, 0);
      std::vector<Vec> inside;
      for (std::size_t i = 0; i < n; ++i) {
        const UnitVec x = sample_uniform(rng, b.d);
        if ((b.N.transpose() * x.coords()).minCoeff() >= 0.0) inside.push_back(x.coords());
      }
      b.fk_points.resize(b.d + 1, static_cast<Eigen::Index>(inside.size()));
      for (std::size_t i = 0; i < inside.size(); ++i) b.fk_points.col(static_cast<Eigen::Index>(i)) = inside[i];
      b.fk_scale = omega(b.d + 1) / static_cast<double>(std::max<std::size_t>(n, 1));
    }
  }
  return b;
}

// e must be strictly interior and see every vertex in its open hemisphere.
bool valid_center(const Body& b, const Vec& e) {
  return (b.N.transpose() * e).minCoeff() > 1e-12 && (b.V.transpose() * e).minCoeff() > 1e-12;
}

double l2_objective(const Body& b, const Vec& e) {
  if (!valid_center(b, e)) return kInf;
  const Mat T = tangent_frame(UnitVec(e), b.anchor);
  const Mat U = T * b.nodes;
  const Vec slacks = b.N.transpose() * e;
  const Mat SU = b.N.transpose() * U;
  const Eigen::Index G = U.cols();
  Vec values(G);
  for (Eigen::Index k = 0; k < G; ++k) {
    double alpha = kHalfPi;
    for (Eigen::Index j = 0; j < SU.rows(); ++j) {
      if (SU(j, k) < 0.0) alpha = std::min(alpha, std::atan2(slacks[j], -SU(j, k)));
    }
    values[k] = sine_integral_D(b.d, alpha);
  }
  const double mean = values.mean();
  return std::sqrt((values.array() - mean).square().mean());
}

double range_objective(const Body& b, const Vec& e) {
  if (!valid_center(b, e)) return kInf;
  const double r = std::asin(std::clamp((b.N.transpose() * e).minCoeff(), 0.0, 1.0));
  const double R = std::acos(std::clamp((b.V.transpose() * e).minCoeff(), -1.0, 1.0));
  return R - r;
}

double fk_objective(const Body& b, const Vec& e) {
  if (!valid_center(b, e)) return kInf;
  if (b.d == 2) {
    const Mat T = tangent_frame(UnitVec(e), b.anchor);
    const std::size_t k = b.ring.size();
    std::vector<Eigen::Vector2d> q(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Vec& v = b.ring[i].coords();
      const double h = v.dot(e);
      q[i] = Eigen::Vector2d(v.dot(T.col(0)) / h, v.dot(T.col(1)) / h);
    }
    double twice = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& p = q[i];
      const auto& r = q[(i + 1) % k];
      twice += p.x() * r.y() - r.x() * p.y();
    }
    return 0.5 * std::abs(twice);
  }
  const Vec h = b.fk_points.transpose() * e;
  return b.fk_scale * h.array().pow(-(b.d + 1)).sum();
}

// Local descent in the tangent chart e(z) = normalize(e0 + T0 z).
Vec refine(const Body& b, const Vec& e0, double (*objective)(const Body&, const Vec&), int iterations) {
  const Mat T0 = tangent_frame(UnitVec(e0), b.anchor);
  const double r0 = std::asin(std::clamp((b.N.transpose() * e0).minCoeff(), 0.0, 1.0));
  const double step = std::max(1e-4, 0.25 * std::tan(r0));
  auto chart = [&](const Vec& z) -> Vec { return (e0 + T0 * z).normalized(); };
  const auto res = detail::nelder_mead([&](const Vec& z) { return objective(b, chart(z)); }, Vec::Zero(b.d), step,
                                       iterations, 1e-10);
  const Vec e = chart(res.x);
  return objective(b, e) <= objective(b, e0) ? e : e0;
}

}  // namespace

double combined_std_error(const Estimate& a, const Estimate& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

std::string_view to_string(SizeKind kind) noexcept {
  switch (kind) {
    case SizeKind::Volume: return "volume";
    case SizeKind::Inradius: return "inradius";
    case SizeKind::CentredInradius: return "centred-inradius";
  }
  return "?";
}

std::optional<SizeKind> parse_size_kind(std::string_view name) noexcept {
  if (name == "volume" || name == "Volume") return SizeKind::Volume;
  if (name == "inradius" || name == "Inradius") return SizeKind::Inradius;
  if (name == "centred-inradius" || name == "CentredInradius" || name == "centred_inradius") return SizeKind::CentredInradius;
  return std::nullopt;
}

// ------------------------------------------------------------------ volume

Estimate volume(const HPolytope& P, std::size_t n, std::uint64_t seed) {
  const int d = P.dim();
  if (P.is_whole_sphere()) return Estimate::exact(omega(d + 1));
  const Mat N = P.normal_matrix();
  const std::uint64_t hits = count_hits(n, seed, [&](Rng& rng) {
    const UnitVec x = sample_uniform(rng, d);
    return (N.transpose() * x.coords()).minCoeff() >= 0.0;
  });
  return fraction_estimate(hits, n, omega(d + 1), seed);
}

double polygon_area(const std::vector<UnitVec>& polygon) {
  if (polygon.size() < 3) return 0.0;
  const auto ring = cyclic_order(polygon);
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& v : ring) c += v.coords().head<3>();
  c.normalize();
  double area = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    area += triangle_area(c, ring[i].coords().head<3>(), ring[(i + 1) % ring.size()].coords().head<3>());
  }
  return area;
}

std::optional<double> exact_area(const HPolytope& P) {
  if (P.dim() != 2) return std::nullopt;
  if (P.is_whole_sphere()) return 4.0 * kPi;
  const VertexEnumeration ve = enumerate_vertices(P);
  if (ve.line_free) return polygon_area(ve.vertices);
  const int rank = normal_rank(P);
  if (rank <= 1) return 2.0 * kPi;
  return lune_area(P);
}

Estimate cell_volume(const HPolytope& P, std::size_t n, std::uint64_t seed) {
  if (auto a = exact_area(P)) return Estimate::exact(*a);
  return volume(P, n, seed);
}

// ---------------------------------------------------------------- hitting

Estimate U1(const VPolytope& K, std::size_t n, std::uint64_t seed) {
  if (K.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "U1 of an empty body");
  const int d = K.dim();
  const Mat V = K.vertex_matrix();
  const std::uint64_t hits = count_hits(n, seed, [&](Rng& rng) {
    const UnitVec x = sample_uniform(rng, d);
    const Vec s = V.transpose() * x.coords();
    return s.minCoeff() <= 1e-12 && s.maxCoeff() >= -1e-12;
  });
  return fraction_estimate(hits, n, 0.5, seed);
}

Estimate U1_exact_via_polar(const VPolytope& K, std::size_t n, std::uint64_t seed) {
  if (!K.proper()) return Estimate::exact(0.5);
  const HPolytope Kstar = polar(K);
  const double w = omega(K.dim() + 1);
  if (K.dim() == 2 && n == 0) return Estimate::exact(0.5 - *exact_area(Kstar) / w);
  const Estimate area = volume(Kstar, n, seed);
  return {0.5 - area.value / w, area.std_error / w, area.n, seed};
}

double U1_exact_2d(const HPolytope& P) {
  if (P.dim() != 2) throw GeometryError(ErrorKind::DimensionMismatch, "U1_exact_2d needs d = 2");
  if (P.is_whole_sphere()) return 0.5;
  const VertexEnumeration ve = enumerate_vertices(P);
  if (!ve.line_free) return 0.5;
  // The polar of a polygon has area 2 pi minus its perimeter.
  const auto ring = cyclic_order(ve.vertices);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) perimeter += geodesic_distance(ring[i], ring[(i + 1) % ring.size()]);
  return perimeter / (4.0 * kPi);
}

Estimate U_tilde(const VPolytope& K, const UnitVec& e, std::size_t n, std::uint64_t seed) {
  if (K.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "U_tilde of an empty body");
  if (e.dim() != K.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "U_tilde");
  for (const auto& v : K.vertices()) {
    if (v.dot(e) < -1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "body leaves the closed hemisphere of e");
  }
  if (!contains(K, e)) throw GeometryError(ErrorKind::NotInterior, "e is not in the body");
  const int d = K.dim();
  const Mat V = K.vertex_matrix();
  const std::uint64_t hits = count_hits(n, seed, [&](Rng& rng) {
    const UnitVec x = sample_uniform(rng, d);
    const Vec s = V.transpose() * (x.coords() - e.coords());
    return s.minCoeff() <= 1e-12 && s.maxCoeff() >= -1e-12;
  });
  return fraction_estimate(hits, n, omega(d + 1), seed);
}

// ------------------------------------------------------------------ radii

double centred_inradius(const HPolytope& P, const UnitVec& e) {
  if (e.dim() != P.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "centred_inradius");
  if (P.is_whole_sphere()) return kHalfPi;
  const double s = min_slack(P, e);
  if (s < -1e-12) throw GeometryError(ErrorKind::NotInterior, "centre is outside the body");
  return std::asin(std::clamp(s, 0.0, 1.0));
}

double centred_circumradius(const VPolytope& K, const UnitVec& e) {
  if (K.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "circumradius of an empty body");
  if (e.dim() != K.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "centred_circumradius");
  double R = 0.0;
  for (const auto& v : K.vertices()) R = std::max(R, geodesic_distance(e, v));
  return R;
}

Inball inradius_free(const HPolytope& P) {
  const int d = P.dim();
  if (P.is_whole_sphere()) return {kHalfPi, UnitVec::origin(d), true};
  const Mat N = P.normal_matrix();
  const auto x = least_distance(N.transpose(), Vec::Ones(N.cols()));
  if (!x || x->norm() < 1e-300) throw GeometryError(ErrorKind::Infeasible, "body has empty interior");
  const double norm = x->norm();
  const UnitVec e(*x);
  const double r = std::asin(std::clamp(1.0 / norm, 0.0, 1.0));
  const VertexEnumeration ve = enumerate_vertices(P);
  bool in_hemisphere = true;
  if (ve.line_free) {
    for (const auto& v : ve.vertices) in_hemisphere = in_hemisphere && v.dot(e) >= -1e-9;
  } else {
    in_hemisphere = min_slack(P, e) >= 1.0 - 1e-9;
  }
  return {r, e, in_hemisphere};
}

Ball circumball(const VPolytope& K) {
  if (K.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "circumball of an empty body");
  if (K.size() == 1) return {0.0, K.vertices().front()};
  if (!K.proper()) throw GeometryError(ErrorKind::Improper, "circumball needs a body in an open hemisphere");
  const Mat V = K.vertex_matrix();
  const auto x = least_distance(V.transpose(), Vec::Ones(V.cols()));
  if (!x) throw GeometryError(ErrorKind::Improper, "circumball needs a body in an open hemisphere");
  const double norm = x->norm();
  return {std::acos(std::clamp(1.0 / norm, -1.0, 1.0)), UnitVec(*x)};
}

double theta_centred(const HPolytope& P, const UnitVec& e) {
  const VPolytope K = vertices(P);
  return centred_circumradius(K, e) - centred_inradius(P, e);
}

double theta_r(const HPolytope& P) {
  const Inball ball = inradius_free(P);
  const VPolytope K = vertices(P);
  return centred_circumradius(K, ball.center) - ball.radius;
}

// -------------------------------------------------------------- deviation

double radial_l2_deviation(const HPolytope& P, const UnitVec& e, const DeviationOptions& opts) {
  if (e.dim() != P.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "radial_l2_deviation");
  const Body b = make_body(P, opts, false);
  const double v = l2_objective(b, e.coords());
  if (!std::isfinite(v)) throw GeometryError(ErrorKind::NotInterior, "centre is not admissible for the body");
  return v;
}

double radial_range(const HPolytope& P, const UnitVec& e) {
  if (e.dim() != P.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "radial_range");
  DeviationOptions opts;
  opts.grid = 3;
  const Body b = make_body(P, opts, false);
  const double v = range_objective(b, e.coords());
  if (!std::isfinite(v)) throw GeometryError(ErrorKind::NotInterior, "centre is not admissible for the body");
  return v;
}

double gnomonic_volume(const HPolytope& P, const UnitVec& e, const DeviationOptions& opts) {
  if (e.dim() != P.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "gnomonic_volume");
  const Body b = make_body(P, opts, true);
  const double v = fk_objective(b, e.coords());
  if (!std::isfinite(v)) throw GeometryError(ErrorKind::NotInterior, "centre is not admissible for the body");
  return v;
}

ShapeDeviation shape_deviation(const HPolytope& P, const DeviationOptions& opts) {
  const Body b = make_body(P, opts, true);
  std::vector<Vec> seeds;
  const Inball in = inradius_free(P);
  seeds.push_back(in.center.coords());
  {
    const auto x = least_distance(b.V.transpose(), Vec::Ones(b.V.cols()));
    if (x) seeds.push_back(x->normalized());
  }
  if (std::none_of(seeds.begin(), seeds.end(), [&](const Vec& s) { return valid_center(b, s); })) {
    // Interior point with the body in its open hemisphere.
    Mat G(b.N.cols() + b.V.cols(), b.N.rows());
    G << b.N.transpose(), b.V.transpose();
    const auto x = least_distance(G, Vec::Ones(G.rows()));
    if (x) seeds.push_back(x->normalized());
  }
  for (const Vec& s : seeds) {
    if (!valid_center(b, s)) continue;
    seeds.push_back(refine(b, s, fk_objective, opts.descent_iterations));
    break;
  }

  std::vector<Vec> candidates;
  for (const Vec& s : seeds) {
    if (!valid_center(b, s)) continue;
    candidates.push_back(s);
    candidates.push_back(refine(b, s, l2_objective, opts.descent_iterations));
    candidates.push_back(refine(b, s, range_objective, opts.descent_iterations));
  }
  if (candidates.empty()) throw GeometryError(ErrorKind::Improper, "no admissible centre found");

  ShapeDeviation out{kInf, kInf, UnitVec(candidates.front()), UnitVec(candidates.front()),
                     static_cast<int>(candidates.size())};
  for (const Vec& c : candidates) {
    const double l2 = l2_objective(b, c);
    const double range = range_objective(b, c);
    if (l2 < out.delta2) {
      out.delta2 = l2;
      out.delta2_center = UnitVec(c);
    }
    if (range < out.delta0) {
      out.delta0 = range;
      out.delta0_center = UnitVec(c);
    }
  }
  return out;
}

double delta2(const HPolytope& P, const DeviationOptions& opts) { return shape_deviation(P, opts).delta2; }
double delta0(const HPolytope& P, const DeviationOptions& opts) { return shape_deviation(P, opts).delta0; }

CanonicalDeviation canonical_deviation(double phi_value, double tau_value) {
  if (!(tau_value > 0.0)) throw GeometryError(ErrorKind::OutOfRange, "tau must be positive");
  const double v = phi_value / tau_value - 1.0;
  return {v, v < 0.0};
}

// ------------------------------------------------------------ isoperimetry

std::string_view to_string(TauModel model) noexcept {
  switch (model) {
    case TauModel::VolumeU1: return "VolumeU1";
    case TauModel::InradiusU1: return "InradiusU1";
    case TauModel::VoronoiInradius: return "VoronoiInradius";
  }
  return "?";
}

double tau(TauModel model, int d, double a) {
  if (d < 2) throw GeometryError(ErrorKind::OutOfRange, "d must be at least 2");
  if (!(a > 0.0)) throw GeometryError(ErrorKind::OutOfRange, "size threshold must be positive");
  switch (model) {
    case TauModel::VolumeU1: {
      if (a > omega(d + 1)) throw GeometryError(ErrorKind::OutOfRange, "volume exceeds the sphere");
      const double alpha = cap_radius_for_volume(d, a);
      return alpha >= kHalfPi ? 1.0 : 2.0 * cap_U1(d, alpha);
    }
    case TauModel::InradiusU1:
      if (a > kHalfPi) throw GeometryError(ErrorKind::OutOfRange, "inradius exceeds pi/2");
      return a >= kHalfPi ? 1.0 : 2.0 * cap_U1(d, a);
    case TauModel::VoronoiInradius:
      if (a > kHalfPi) throw GeometryError(ErrorKind::OutOfRange, "inradius exceeds pi/2");
      return cap_volume(d, 2.0 * a) / omega(d + 1);
  }
  return 0.0;
}

TauModel tau_model_for(SizeKind kind) noexcept {
  return kind == SizeKind::Volume ? TauModel::VolumeU1 : TauModel::InradiusU1;
}

}  // namespace sphertess
