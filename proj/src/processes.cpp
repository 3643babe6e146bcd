#include "sphertess/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "sphertess/constants.hpp"
#include "sphertess/functionals.hpp"
#include "sphertess/linalg.hpp"

namespace sphertess {

namespace {

constexpr double kOrthogonalTol = 1e-12;

using SignVector = std::vector<signed char>;

struct CellRecord {
  Vec witness_sum;
  std::vector<int> circles;
};

std::vector<Vec> sorted_columns(const HPolytope& P) {
  std::vector<Vec> cols;
  cols.reserve(P.size());
  for (const auto& n : P.normals()) cols.push_back(n.coords());
  std::sort(cols.begin(), cols.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  return cols;
}

}  // namespace

std::vector<UnitVec> sample_poisson(double gamma_s, int d, Rng& rng) {
  if (!(gamma_s > 0.0) || !std::isfinite(gamma_s)) throw GeometryError(ErrorKind::OutOfRange, "gamma_s must be positive");
  if (d < 2) throw GeometryError(ErrorKind::OutOfRange, "d must be at least 2");
  std::poisson_distribution<long> count(gamma_s * omega(d + 1));
  const long n = count(rng);
  std::vector<UnitVec> points;
  points.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) points.push_back(sample_uniform(rng, d));
  return points;
}

std::vector<UnitVec> sample_poisson(double gamma_s, int d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return sample_poisson(gamma_s, d, rng);
}

HPolytope crofton_cell(const std::vector<UnitVec>& points, const UnitVec& origin) {
  const int d = origin.dim();
  if (points.empty()) return HPolytope(d);
  std::vector<UnitVec> normals;
  normals.reserve(points.size());
  for (const auto& x : points) {
    if (x.dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "point/origin dimension");
    const double s = x.dot(origin);
    if (std::abs(s) < kOrthogonalTol) throw GeometryError(ErrorKind::Degenerate, "great subsphere through the origin");
    normals.push_back(s > 0.0 ? x : -x);
  }
  return HPolytope(d, std::move(normals), origin);
}

Tessellation tessellation_cells(const std::vector<UnitVec>& normals, int d, std::uint64_t seed) {
  if (d != 2) throw GeometryError(ErrorKind::OutOfRange, "full enumeration is implemented for d = 2");
  for (const auto& p : normals) {
    if (p.dim() != 2) throw GeometryError(ErrorKind::DimensionMismatch, "normal dimension");
  }
  Tessellation tess;
  tess.dim = d;
  tess.generators = normals;
  tess.kind = TessellationKind::Hyperplane;
  const int k = static_cast<int>(normals.size());
  if (k == 0) {
    tess.cells.push_back(HPolytope(d));
    return tess;
  }
  if (k == 1) {
    tess.cells.push_back(HPolytope(d, {normals[0]}, normals[0]));
    tess.cells.push_back(HPolytope(d, {-normals[0]}, -normals[0]));
    return tess;
  }

  std::vector<Eigen::Vector3d> p(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) p[i] = normals[i].coords().head<3>();

  std::map<SignVector, CellRecord> cells;
  SignVector signs(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const Eigen::Vector3d cr = p[i].cross(p[j]);
      if (cr.norm() < 1e-9) throw GeometryError(ErrorKind::Degenerate, "coincident great circles");
      const double c = p[i].dot(p[j]);
      const Eigen::Vector3d qi = (p[i] - c * p[j]) / (1.0 - c * c);
      const Eigen::Vector3d qj = (p[j] - c * p[i]) / (1.0 - c * c);
      for (double orient : {1.0, -1.0}) {
        const Eigen::Vector3d v = orient * cr.normalized();
        double clearance = std::numeric_limits<double>::infinity();
        for (int l = 0; l < k; ++l) {
          if (l == i || l == j) continue;
          const double s = v.dot(p[l]);
          if (std::abs(s) < 1e-10) throw GeometryError(ErrorKind::Degenerate, "three great circles through one point");
          signs[l] = s > 0.0 ? 1 : -1;
          clearance = std::min(clearance, std::abs(s));
        }
        const double spread = qi.norm() + qj.norm();
        const double delta = std::min(0.1, 0.25 * clearance / spread);
        for (int si : {1, -1}) {
          for (int sj : {1, -1}) {
            signs[i] = static_cast<signed char>(si);
            signs[j] = static_cast<signed char>(sj);
            const Eigen::Vector3d y = (v + delta * (si * qi + sj * qj)).normalized();
            for (int l = 0; l < k; ++l) {
              if ((y.dot(p[l]) > 0.0 ? 1 : -1) != signs[l]) {
                throw GeometryError(ErrorKind::Degenerate, "witness left its cell");
              }
            }
            auto& rec = cells[signs];
            if (rec.witness_sum.size() == 0) rec.witness_sum = Vec::Zero(3);
            rec.witness_sum += Vec(y);
            rec.circles.push_back(i);
            rec.circles.push_back(j);
          }
        }
      }
    }
  }

  // Random seeds must land in cells that were already found.
  Rng rng = make_rng(seed, 0);
  for (int t = 0; t < 16; ++t) {
    const UnitVec y = sample_uniform(rng, 2);
    for (int l = 0; l < k; ++l) signs[l] = y.dot(normals[l]) > 0.0 ? 1 : -1;
    if (!cells.count(signs)) throw GeometryError(ErrorKind::Degenerate, "random seed found an unlisted cell");
  }
  if (cells.size() != schlafli_count(2, k)) throw GeometryError(ErrorKind::Degenerate, "cell count certificate failed");

  tess.cells.reserve(cells.size());
  for (auto& [sv, rec] : cells) {
    std::sort(rec.circles.begin(), rec.circles.end());
    rec.circles.erase(std::unique(rec.circles.begin(), rec.circles.end()), rec.circles.end());
    std::vector<UnitVec> ns;
    ns.reserve(rec.circles.size());
    for (int l : rec.circles) ns.push_back(sv[l] > 0 ? normals[l] : -normals[l]);
    tess.cells.emplace_back(d, std::move(ns), UnitVec(rec.witness_sum));
  }
  return tess;
}

Rotation centring_rotation(const HPolytope& cell, Rng& rng) {
  std::optional<UnitVec> centre;
  if (!cell.is_whole_sphere()) {
    const VertexEnumeration ve = enumerate_vertices(cell);
    if (ve.line_free) {
      centre = circumball(VPolytope(cell.dim(), ve.vertices)).center;
    } else {
      centre = inradius_free(cell).center;
    }
  } else {
    centre = UnitVec::origin(cell.dim());
  }
  return rotation_to(*centre, rng);
}

HPolytope recentre(const HPolytope& cell, Rng& rng) { return rotate(centring_rotation(cell, rng).inverse(), cell); }

HPolytope typical_cell(const Tessellation& tess, Rng& rng) {
  if (tess.cells.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "empty tessellation");
  std::uniform_int_distribution<std::size_t> pick(0, tess.cells.size() - 1);
  return recentre(tess.cells[pick(rng)], rng);
}

HPolytope voronoi_cell(const UnitVec& x, const std::vector<UnitVec>& A) {
  const int d = x.dim();
  std::vector<UnitVec> normals;
  normals.reserve(A.size());
  for (const auto& z : A) {
    if (z.dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "voronoi_cell");
    const Vec w = x.coords() - z.coords();
    if (w.norm() < 1e-15) continue;
    normals.emplace_back(w);
  }
  if (normals.empty()) return HPolytope(d);
  return HPolytope(d, std::move(normals), x);
}

HPolytope bisector_crofton_cell(const std::vector<UnitVec>& X, const UnitVec& origin) {
  std::vector<UnitVec> subspheres;
  subspheres.reserve(X.size());
  for (const auto& x : X) {
    const Vec w = x.coords() - origin.coords();
    if (w.norm() < 1e-15) continue;
    subspheres.emplace_back(w);
  }
  return crofton_cell(subspheres, origin);
}

VoronoiTypicalSample voronoi_typical_sample(double gamma_s, int d, Rng& rng) {
  VoronoiTypicalSample s{sample_poisson(gamma_s, d, rng), HPolytope(d), HPolytope(d)};
  const UnitVec o = UnitVec::origin(d);
  std::vector<UnitVec> with_origin = s.points;
  with_origin.push_back(o);
  s.voronoi = voronoi_cell(o, with_origin);
  s.bisector = bisector_crofton_cell(s.points, o);
  return s;
}

HPolytope voronoi_typical_cell(double gamma_s, int d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  return voronoi_typical_sample(gamma_s, d, rng).voronoi;
}

double normal_set_distance(const HPolytope& a, const HPolytope& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto ca = sorted_columns(a);
  const auto cb = sorted_columns(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) worst = std::max(worst, (ca[i] - cb[i]).cwiseAbs().maxCoeff());
  return worst;
}

Tessellation voronoi_tessellation(const std::vector<UnitVec>& points, int d) {
  if (points.empty()) throw GeometryError(ErrorKind::PreconditionFailed, "Voronoi tessellation needs a point");
  Tessellation tess;
  tess.dim = d;
  tess.generators = points;
  tess.kind = TessellationKind::Voronoi;
  tess.cells.reserve(points.size());
  for (const auto& x : points) tess.cells.push_back(voronoi_cell(x, points));
  return tess;
}

}  // namespace sphertess
