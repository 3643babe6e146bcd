#include "sphertess/spherical_convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sphertess/linalg.hpp"

namespace sphertess {

namespace {

constexpr double kMembershipTol = 1e-12;
constexpr double kVertexTol = 1e-9;

Vec slerp(const Vec& a, const Vec& b, double t) {
  const double theta = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  if (theta < 1e-15) return a;
  const double s = std::sin(theta);
  Vec p = (std::sin((1.0 - t) * theta) / s) * a + (std::sin(t * theta) / s) * b;
  return p.normalized();
}

Mat columns_of(const std::vector<UnitVec>& points, int ambient) {
  Mat m(ambient, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = points[j].coords();
  return m;
}

std::vector<UnitVec> dedup(std::vector<UnitVec> points) {
  std::vector<UnitVec> out;
  out.reserve(points.size());
  for (auto& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const UnitVec& q) {
      return (q.coords() - p.coords()).norm() <= kVertexTol;
    });
    if (!seen) out.push_back(std::move(p));
  }
  return out;
}

// Directions on the unit sphere of R^k (k = 2 or 3) used to discretize caps.
std::vector<Vec> tangent_directions(int k, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (k == 2) {
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      Vec u(2);
      u << std::cos(phi), std::sin(phi);
      dirs.push_back(u);
    }
  } else if (k == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec u(3);
      u << r * std::cos(golden * j), r * std::sin(golden * j), z;
      dirs.push_back(u);
    }
  } else {
    throw GeometryError(ErrorKind::OutOfRange, "cap discretization is implemented for d = 2 and d = 3");
  }
  return dirs;
}

}  // namespace

// -------------------------------------------------------------- HPolytope

HPolytope::HPolytope(int d, std::vector<UnitVec> normals, std::optional<UnitVec> witness)
    : dim_(d), normals_(std::move(normals)), witness_(std::move(witness)) {
  for (const auto& n : normals_) {
    if (n.dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "normal dimension differs from polytope");
  }
  if (witness_) {
    if (witness_->dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "witness dimension");
    for (const auto& n : normals_) {
      if (!(witness_->dot(n) > 0.0)) throw GeometryError(ErrorKind::NotInterior, "witness is not strictly interior");
    }
  }
}

Mat HPolytope::normal_matrix() const { return columns_of(normals_, dim_ + 1); }

// -------------------------------------------------------------- VPolytope

VPolytope::VPolytope(int d, std::vector<UnitVec> vertices) : dim_(d) {
  for (const auto& v : vertices) {
    if (v.dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "vertex dimension differs from polytope");
  }
  vertices_ = dedup(std::move(vertices));
  if (vertices_.empty()) return;

  const Mat V = vertex_matrix();
  proper_ = least_distance(V.transpose(), Vec::Ones(V.cols())).has_value();
  if (!proper_ || vertices_.size() <= 1) return;

  // Drop vertices lying in the cone of the remaining ones.
  std::size_t j = 0;
  while (j < vertices_.size() && vertices_.size() > 1) {
    Mat others(d + 1, static_cast<Eigen::Index>(vertices_.size() - 1));
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (i != j) others.col(c++) = vertices_[i].coords();
    const NnlsResult fit = nnls(others, vertices_[j].coords());
    if (fit.residual_norm < 1e-10) {
      vertices_.erase(vertices_.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      ++j;
    }
  }
}

Mat VPolytope::vertex_matrix() const { return columns_of(vertices_, dim_ + 1); }

// ------------------------------------------------------------- membership

double min_slack(const HPolytope& P, const UnitVec& y) {
  if (y.dim() != P.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "point/polytope dimension");
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& n : P.normals()) slack = std::min(slack, y.dot(n));
  return slack;
}

bool contains(const HPolytope& P, const UnitVec& y) { return min_slack(P, y) >= -kMembershipTol; }

std::optional<UnitVec> interior_point(const HPolytope& P) {
  if (P.is_whole_sphere()) return UnitVec::origin(P.dim());
  const Mat N = P.normal_matrix();
  auto x = least_distance(N.transpose(), Vec::Ones(N.cols()));
  if (!x || x->norm() < 1e-300) return std::nullopt;
  return UnitVec(*x);
}

// --------------------------------------------------------------- vertices

VertexEnumeration enumerate_vertices(const HPolytope& P) {
  VertexEnumeration out;
  const int d = P.dim();
  if (P.is_whole_sphere()) return out;
  if (!P.witness() && !interior_point(P)) throw GeometryError(ErrorKind::Infeasible, "polytope has empty interior");

  const Mat N = P.normal_matrix();
  const Eigen::Index m = N.cols();
  Eigen::FullPivLU<Mat> rank_lu(N);
  out.line_free = rank_lu.rank() == d + 1;
  if (!out.line_free || m < d) return out;

  std::vector<UnitVec> found;
  auto try_candidate = [&](const Vec& ray, const std::vector<Eigen::Index>& subset) {
    for (double sign : {1.0, -1.0}) {
      const Vec w = sign * ray;
      bool feasible = true;
      bool ambiguous = false;
      for (Eigen::Index l = 0; l < m && feasible; ++l) {
        if (std::find(subset.begin(), subset.end(), l) != subset.end()) continue;
        const double r = w.dot(N.col(l));
        if (r <= -kVertexTol) feasible = false;
        else if (r < 0.0) ambiguous = true;
      }
      if (!feasible) continue;
      if (ambiguous) {
        ++out.degenerate_subsets;
        continue;
      }
      found.emplace_back(w);
    }
  };

  std::vector<Eigen::Index> subset(static_cast<std::size_t>(d));
  if (d == 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const Eigen::Vector3d a = N.col(i).head<3>();
        const Eigen::Vector3d b = N.col(j).head<3>();
        const Eigen::Vector3d c = a.cross(b);
        const double norm = c.norm();
        if (norm < 1e-12) {
          ++out.degenerate_subsets;
          continue;
        }
        subset[0] = i;
        subset[1] = j;
        try_candidate(Vec(c / norm), subset);
      }
    }
  } else {
    // Lexicographic scan over d-subsets of the m normals.
    std::vector<bool> mask(static_cast<std::size_t>(m), false);
    std::fill(mask.begin(), mask.begin() + d, true);
    do {
      subset.clear();
      for (Eigen::Index l = 0; l < m; ++l)
        if (mask[l]) subset.push_back(l);
      Mat A(d, d + 1);
      for (int r = 0; r < d; ++r) A.row(r) = N.col(subset[r]).transpose();
      Eigen::FullPivLU<Mat> lu(A);
      const Mat kernel = lu.kernel();
      if (lu.rank() != d || kernel.cols() != 1) {
        ++out.degenerate_subsets;
        continue;
      }
      try_candidate(Vec(kernel.col(0).normalized()), subset);
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  out.vertices = dedup(std::move(found));
  return out;
}

VPolytope vertices(const HPolytope& P) {
  VertexEnumeration e = enumerate_vertices(P);
  if (!e.line_free) throw GeometryError(ErrorKind::Improper, "body is not line-free; it has no vertex representation");
  return VPolytope(P.dim(), std::move(e.vertices));
}

// ------------------------------------------------------------------ polar

HPolytope polar(const VPolytope& K) {
  if (!K.proper()) throw GeometryError(ErrorKind::Improper, "polar of an improper body has empty interior");
  std::vector<UnitVec> normals;
  normals.reserve(K.size());
  for (const auto& v : K.vertices()) normals.push_back(-v);
  HPolytope P(K.dim(), std::move(normals));
  auto w = interior_point(P);
  return HPolytope(P.dim(), P.normals(), w);
}

VPolytope polar(const HPolytope& P) {
  if (P.is_whole_sphere()) throw GeometryError(ErrorKind::Improper, "polar of the whole sphere is empty");
  std::vector<UnitVec> verts;
  verts.reserve(P.size());
  for (const auto& n : P.normals()) verts.push_back(-n);
  return VPolytope(P.dim(), std::move(verts));
}

// ---------------------------------------------------------------- hitting

bool hits_great_subsphere(const VPolytope& K, const Vec& x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : K.vertices()) {
    const double s = v.coords().dot(x);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    if (lo <= kMembershipTol && hi >= -kMembershipTol) return true;
  }
  return false;
}

bool hits_great_subsphere(const VPolytope& K, const UnitVec& x) {
  if (x.dim() != K.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "subsphere/polytope dimension");
  return hits_great_subsphere(K, x.coords());
}

// ---------------------------------------------------------------- radial

double radial_function_unchecked(const Mat& normals, const Vec& e_slacks, const Vec& u) {
  double alpha = kHalfPi;
  const Vec su = normals.transpose() * u;
  for (Eigen::Index j = 0; j < su.size(); ++j) {
    if (su[j] < 0.0) alpha = std::min(alpha, std::atan2(e_slacks[j], -su[j]));
  }
  return alpha;
}

double radial_function(const HPolytope& P, const UnitVec& e, const Vec& u) {
  if (e.dim() != P.dim() || u.size() != e.ambient()) throw GeometryError(ErrorKind::DimensionMismatch, "radial_function");
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(u.dot(e.coords())) > 1e-9) {
    throw GeometryError(ErrorKind::OutOfRange, "direction must be a unit tangent vector at e");
  }
  if (!(min_slack(P, e) > 0.0)) throw GeometryError(ErrorKind::NotInterior, "centre is not strictly interior");
  if (!P.is_whole_sphere()) {
    const VertexEnumeration ve = enumerate_vertices(P);
    if (!ve.line_free && P.size() > 0) {
      // Improper bodies are never inside a closed hemisphere except the hemisphere itself.
      const double slack = min_slack(P, e);
      if (slack < 1.0 - 1e-12) throw GeometryError(ErrorKind::Improper, "body leaves the closed hemisphere of e");
    }
    for (const auto& v : ve.vertices) {
      if (v.dot(e) < -1e-12) throw GeometryError(ErrorKind::Improper, "body leaves the closed hemisphere of e");
    }
  }
  const Mat N = P.normal_matrix();
  const Vec slacks = N.transpose() * e.coords();
  return radial_function_unchecked(N, slacks, u);
}

// -------------------------------------------------------------- distances

double distance_to(const VPolytope& K, const UnitVec& y) {
  if (K.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "distance to an empty body");
  if (y.dim() != K.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "distance_to");
  if (K.size() == 1) return geodesic_distance(K.vertices().front(), y);
  const Vec p = project_onto_cone(K.vertex_matrix(), y.coords());
  const double np = p.norm();
  if (np > 1e-12) {
    // y = p + q with q orthogonal to p; the angle between y and p is the distance.
    return std::atan2((y.coords() - p).norm(), np);
  }
  // y lies in the polar cone; fall back to the nearest vertex (an upper bound).
  double best = kPi;
  for (const auto& v : K.vertices()) best = std::min(best, geodesic_distance(v, y));
  return best;
}

bool contains(const VPolytope& K, const UnitVec& y) { return distance_to(K, y) <= 1e-9; }

std::vector<UnitVec> cyclic_order(const std::vector<UnitVec>& polygon) {
  if (polygon.empty()) return {};
  if (polygon.front().dim() != 2) throw GeometryError(ErrorKind::DimensionMismatch, "cyclic_order is for d = 2");
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& v : polygon) c += v.coords().head<3>();
  if (c.norm() < 1e-14) throw GeometryError(ErrorKind::Improper, "polygon centroid vanishes");
  c.normalize();
  Eigen::Vector3d t1 = std::abs(c.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  t1 = (t1 - t1.dot(c) * c).normalized();
  const Eigen::Vector3d t2 = c.cross(t1);
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector3d v = polygon[i].coords().head<3>();
    keyed.emplace_back(std::atan2(v.dot(t2), v.dot(t1)), i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<UnitVec> out;
  out.reserve(polygon.size());
  for (const auto& [angle, i] : keyed) out.push_back(polygon[i]);
  return out;
}

namespace {

std::vector<std::pair<UnitVec, UnitVec>> edges_of(const VPolytope& K) {
  std::vector<std::pair<UnitVec, UnitVec>> edges;
  const auto& vs = K.vertices();
  if (vs.size() < 2) return edges;
  if (K.dim() == 2 && vs.size() >= 3 && K.proper()) {
    const auto ring = cyclic_order(vs);
    for (std::size_t i = 0; i < ring.size(); ++i) edges.emplace_back(ring[i], ring[(i + 1) % ring.size()]);
    return edges;
  }
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) edges.emplace_back(vs[i], vs[j]);
  return edges;
}

double one_sided(const VPolytope& from, const VPolytope& to, int per_edge, double& mesh) {
  double worst = 0.0;
  for (const auto& v : from.vertices()) worst = std::max(worst, distance_to(to, v));
  for (const auto& [a, b] : edges_of(from)) {
    mesh = std::max(mesh, geodesic_distance(a, b) / (per_edge + 1));
    for (int s = 1; s <= per_edge; ++s) {
      const UnitVec p(slerp(a.coords(), b.coords(), static_cast<double>(s) / (per_edge + 1)));
      worst = std::max(worst, distance_to(to, p));
    }
  }
  return worst;
}

}  // namespace

HausdorffEstimate hausdorff_distance(const VPolytope& K, const VPolytope& Q, int samples_per_edge) {
  if (K.empty() || Q.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "Hausdorff distance of empty bodies");
  if (K.dim() != Q.dim()) throw GeometryError(ErrorKind::DimensionMismatch, "hausdorff_distance");
  if (samples_per_edge < 0) throw GeometryError(ErrorKind::OutOfRange, "samples_per_edge must be >= 0");
  double mesh = 0.0;
  const double forward = one_sided(K, Q, samples_per_edge, mesh);
  const double backward = one_sided(Q, K, samples_per_edge, mesh);
  return {std::max(forward, backward), mesh};
}

VPolytope simplify_vertices(const VPolytope& P, int k) {
  if (k < P.dim() + 1) throw GeometryError(ErrorKind::OutOfRange, "simplify_vertices needs k >= d + 1");
  if (!P.proper()) throw GeometryError(ErrorKind::Improper, "simplify_vertices needs a proper body");
  if (static_cast<int>(P.size()) <= k) return P;
  const auto& vs = P.vertices();
  std::vector<bool> chosen(vs.size(), false);
  std::vector<UnitVec> picked{vs.front()};
  chosen[0] = true;
  while (static_cast<int>(picked.size()) < k) {
    const VPolytope current(P.dim(), picked);
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (chosen[i]) continue;
      const double dist = distance_to(current, vs[i]);
      if (dist > best) {
        best = dist;
        best_index = i;
      }
    }
    if (best <= 0.0) break;
    chosen[best_index] = true;
    picked.push_back(vs[best_index]);
  }
  return VPolytope(P.dim(), std::move(picked));
}

// ------------------------------------------------------------ frames, caps

Mat tangent_frame(const UnitVec& e, const std::optional<UnitVec>& anchor) {
  const int n = e.ambient();
  Mat frame(n, n - 1);
  int filled = 0;
  auto push = [&](Vec v) {
    v -= v.dot(e.coords()) * e.coords();
    for (int j = 0; j < filled; ++j) v -= v.dot(frame.col(j)) * frame.col(j);
    const double norm = v.norm();
    if (norm < 1e-8) return;
    frame.col(filled++) = v / norm;
  };
  if (anchor) push(anchor->coords());
  for (int i = 0; i < n && filled < n - 1; ++i) push(Vec(Vec::Unit(n, i)));
  return frame;
}

HPolytope cap_polytope(const Cap& cap, int facets) {
  const int d = cap.dim();
  const double a = cap.radius();
  if (!cap.proper() || a <= 0.0) throw GeometryError(ErrorKind::OutOfRange, "cap_polytope needs radius in (0, pi/2]");
  if (a >= kHalfPi) return HPolytope(d, {cap.center()}, cap.center());
  if (facets < d + 1) throw GeometryError(ErrorKind::OutOfRange, "too few facets");
  const Mat frame = tangent_frame(cap.center());
  std::vector<UnitVec> normals;
  for (const Vec& t : tangent_directions(d, facets)) {
    const Vec u = frame * t;
    normals.emplace_back(Vec(std::sin(a) * cap.center().coords() - std::cos(a) * u));
  }
  return HPolytope(d, std::move(normals), cap.center());
}

VPolytope cap_vertex_polytope(const Cap& cap, int count) {
  const int d = cap.dim();
  const double a = cap.radius();
  if (!(a > 0.0 && a < kHalfPi)) throw GeometryError(ErrorKind::OutOfRange, "cap_vertex_polytope needs radius in (0, pi/2)");
  const Mat frame = tangent_frame(cap.center());
  std::vector<UnitVec> verts;
  for (const Vec& t : tangent_directions(d, count)) {
    verts.emplace_back(Vec(std::cos(a) * cap.center().coords() + std::sin(a) * (frame * t)));
  }
  return VPolytope(d, std::move(verts));
}

HPolytope rotate(const Rotation& R, const HPolytope& P) {
  std::vector<UnitVec> normals;
  normals.reserve(P.size());
  for (const auto& n : P.normals()) normals.push_back(R.apply(n));
  std::optional<UnitVec> w;
  if (P.witness()) w = R.apply(*P.witness());
  return HPolytope(P.dim(), std::move(normals), std::move(w));
}

VPolytope rotate(const Rotation& R, const VPolytope& K) {
  std::vector<UnitVec> verts;
  verts.reserve(K.size());
  for (const auto& v : K.vertices()) verts.push_back(R.apply(v));
  return VPolytope(K.dim(), std::move(verts));
}

}  // namespace sphertess
