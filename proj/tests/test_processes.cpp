#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sphertess/constants.hpp"
#include "sphertess/functionals.hpp"
#include "sphertess/processes.hpp"

using namespace sphertess;

namespace {

std::vector<UnitVec> uniform_points(Rng& rng, int d, int k) {
  std::vector<UnitVec> out;
  for (int i = 0; i < k; ++i) out.push_back(sample_uniform(rng, d));
  return out;
}

// Index of the cell whose interior contains x, or -1.
int cell_of(const Tessellation& t, const UnitVec& x) {
  int found = -1;
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    if (min_slack(t.cells[i], x) > 1e-12) {
      if (found >= 0) return -2;
      found = static_cast<int>(i);
    }
  }
  return found;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return best;
}

}  // namespace

TEST(SamplePoisson, MeanCount) {
  const double gamma = 4.0 / (4.0 * kPi);
  double total = 0.0;
  bool saw_empty = false;
  for (int i = 0; i < 10000; ++i) {
    const auto pts = sample_poisson(gamma, 2, derive_seed(1, i));
    total += pts.size();
    saw_empty = saw_empty || pts.empty();
    for (const auto& p : pts) ASSERT_NEAR(p.coords().norm(), 1.0, 1e-12);
  }
  EXPECT_NEAR(total / 10000.0, 4.0, 3.0 * std::sqrt(4.0 / 10000.0));
  EXPECT_TRUE(saw_empty);
  EXPECT_THROW(sample_poisson(0.0, 2, 1), GeometryError);
  EXPECT_THROW(sample_poisson(-1.0, 2, 1), GeometryError);
}

TEST(SamplePoisson, DeterministicInSeed) {
  const auto a = sample_poisson(3.0, 3, 42);
  const auto b = sample_poisson(3.0, 3, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].coords(), b[i].coords());
}

TEST(CroftonCell, Examples) {
  const UnitVec o = UnitVec::origin(2);
  EXPECT_TRUE(crofton_cell({}, o).is_whole_sphere());
  const HPolytope h = crofton_cell({UnitVec{-0.3, 0.9, 0.1}}, o);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_GT(h.normals()[0].dot(o), 0.0);
  EXPECT_TRUE(contains(h, o));
  try {
    crofton_cell({UnitVec::basis(2, 1)}, o);
    FAIL() << "expected a degenerate draw";
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
  }
}

TEST(CroftonCell, OriginInteriorAndMonotone) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 3;
    const UnitVec o = UnitVec::origin(d);
    auto pts = uniform_points(rng, d, 1 + trial % 25);
    const HPolytope P = crofton_cell(pts, o);
    for (const auto& n : P.normals()) EXPECT_GT(n.dot(o), 0.0);
    pts.push_back(sample_uniform(rng, d));
    const HPolytope Q = crofton_cell(pts, o);
    for (int i = 0; i < 50; ++i) {
      const UnitVec y = sample_uniform(rng, d);
      if (contains(Q, y)) {
        EXPECT_TRUE(contains(P, y));
      }
    }
  }
}

TEST(Tessellation, SmallCounts) {
  EXPECT_EQ(tessellation_cells({}, 2, 1).cells.size(), 1u);
  const Tessellation one = tessellation_cells({UnitVec{0.2, 0.3, 0.9}}, 2, 1);
  ASSERT_EQ(one.cells.size(), 2u);
  EXPECT_NEAR(*exact_area(one.cells[0]), 2.0 * kPi, 1e-12);
  const Tessellation three = tessellation_cells({UnitVec{1.0, 0.1, 0.2}, UnitVec{0.1, 1.0, -0.3}, UnitVec{0.3, 0.2, 1.0}}, 2, 1);
  EXPECT_EQ(three.cells.size(), 8u);
}

TEST(Tessellation, SchlafliCountAndPartition) {
  Rng rng(4);
  for (int k = 0; k <= 10; ++k) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto normals = uniform_points(rng, 2, k);
      const Tessellation t = tessellation_cells(normals, 2, derive_seed(5, k * 100 + rep));
      EXPECT_EQ(t.cells.size(), schlafli_count(2, k));
      double total = 0.0;
      for (const auto& c : t.cells) {
        total += *exact_area(c);
        if (c.is_whole_sphere()) continue;
        ASSERT_TRUE(c.witness().has_value());
        EXPECT_GT(min_slack(c, *c.witness()), 0.0);
      }
      EXPECT_NEAR(total, 4.0 * kPi, 1e-9);
      // Every sampled point lies in exactly one cell interior.
      for (int i = 0; i < 200; ++i) EXPECT_GE(cell_of(t, sample_uniform(rng, 2)), 0);
    }
  }
}

TEST(Tessellation, SampledSignVectorsAreEnumerated) {
  Rng rng(6);
  for (int k = 2; k <= 6; ++k) {
    const auto normals = uniform_points(rng, 2, k);
    std::set<std::vector<bool>> sampled;
    for (int i = 0; i < 200000; ++i) {
      const UnitVec x = sample_uniform(rng, 2);
      std::vector<bool> sign;
      for (const auto& n : normals) sign.push_back(n.dot(x) > 0.0);
      sampled.insert(sign);
    }
    const Tessellation t = tessellation_cells(normals, 2, 7);
    EXPECT_LE(sampled.size(), t.cells.size());
    EXPECT_EQ(t.cells.size(), schlafli_count(2, k));
  }
}

TEST(TypicalCell, CircumcentreAtOrigin) {
  Rng rng(8);
  const UnitVec o = UnitVec::origin(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Tessellation t = tessellation_cells(uniform_points(rng, 2, 3 + trial % 8), 2, derive_seed(9, trial));
    const HPolytope Z = typical_cell(t, rng);
    EXPECT_TRUE(contains(Z, o));
    const VertexEnumeration ve = enumerate_vertices(Z);
    if (!ve.line_free) continue;
    const Ball b = circumball(VPolytope(2, ve.vertices));
    EXPECT_LT(geodesic_distance(b.center, o), 1e-8);
  }
}

TEST(TypicalCell, InvariantUnderRotationsFixingOrigin) {
  // Direction-dependent statistic: largest first tangent coordinate over the vertices.
  Rng rng(10);
  std::vector<double> raw, rotated;
  auto stat = [](const HPolytope& Z) {
    const VertexEnumeration ve = enumerate_vertices(Z);
    double m = -2.0;
    for (const auto& v : ve.vertices) m = std::max(m, v[1]);
    return m;
  };
  for (int i = 0; i < 1500; ++i) {
    const Tessellation t = tessellation_cells(uniform_points(rng, 2, 6), 2, derive_seed(11, i));
    const HPolytope Z = typical_cell(t, rng);
    if (!enumerate_vertices(Z).line_free) continue;
    raw.push_back(stat(Z));
    const Tessellation t2 = tessellation_cells(uniform_points(rng, 2, 6), 2, derive_seed(12, i));
    const HPolytope Z2 = typical_cell(t2, rng);
    if (!enumerate_vertices(Z2).line_free) continue;
    rotated.push_back(stat(rotate(random_rotation_fixing_origin(rng, 2), Z2)));
  }
  const double n = raw.size(), m = rotated.size();
  const double critical = 1.628 * std::sqrt((n + m) / (n * m));  // 1% level
  EXPECT_LT(ks_statistic(raw, rotated), critical);
}

TEST(VoronoiCell, Examples) {
  const UnitVec x{0.3, -0.4, 0.5};
  EXPECT_TRUE(voronoi_cell(x, {x}).is_whole_sphere());
  const HPolytope h = voronoi_cell(x, {x, -x});
  ASSERT_EQ(h.size(), 1u);
  EXPECT_LT((h.normals()[0].coords() - x.coords()).norm(), 1e-12);
  Rng rng(13);
  const auto A = uniform_points(rng, 2, 30);
  const HPolytope C = voronoi_cell(A[0], A);
  EXPECT_EQ(C.size(), 29u);
  for (int i = 0; i < 2000; ++i) {
    const UnitVec y = sample_uniform(rng, 2);
    if (!contains(C, y)) continue;
    for (const auto& z : A) EXPECT_LE(geodesic_distance(y, A[0]), geodesic_distance(y, z) + 1e-9);
  }
}

TEST(VoronoiTypical, EmptyProcessAndBisectorIdentity) {
  EXPECT_TRUE(voronoi_typical_cell(1e-9, 2, 1).is_whole_sphere());
  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const int d = 2 + i % 2;
    const VoronoiTypicalSample s = voronoi_typical_sample(3.0, d, rng);
    EXPECT_EQ(s.voronoi.size(), s.points.size());
    EXPECT_LE(normal_set_distance(s.voronoi, s.bisector), 1e-10);
  }
}

TEST(VoronoiTessellation, Examples) {
  const UnitVec x{0.0, 0.6, 0.8};
  const Tessellation two = voronoi_tessellation({x, -x}, 2);
  ASSERT_EQ(two.cells.size(), 2u);
  EXPECT_EQ(two.kind, TessellationKind::Voronoi);
  for (const auto& c : two.cells) EXPECT_NEAR(*exact_area(c), 2.0 * kPi, 1e-12);
  const std::vector<UnitVec> tetra{UnitVec{1.0, 1.0, 1.0}, UnitVec{1.0, -1.0, -1.0}, UnitVec{-1.0, 1.0, -1.0},
                                   UnitVec{-1.0, -1.0, 1.0}};
  const Tessellation t = voronoi_tessellation(tetra, 2);
  ASSERT_EQ(t.cells.size(), 4u);
  for (const auto& c : t.cells) {
    EXPECT_NEAR(*exact_area(c), kPi, 1e-12);
    EXPECT_NEAR(volume(c, 100000, 3).value, kPi, 3.0 * volume(c, 100000, 3).std_error);
  }
}

TEST(VoronoiTessellation, PartitionAndEquivariance) {
  Rng rng(15);
  const auto A = uniform_points(rng, 2, 25);
  const Tessellation t = voronoi_tessellation(A, 2);
  double total = 0.0;
  for (const auto& c : t.cells) total += *exact_area(c);
  EXPECT_NEAR(total, 4.0 * kPi, 1e-9);
  const Rotation R = haar_rotation(rng, 2);
  std::vector<UnitVec> RA;
  for (const auto& a : A) RA.push_back(R(a));
  for (std::size_t i = 0; i < A.size(); ++i) {
    EXPECT_LE(normal_set_distance(voronoi_cell(RA[i], RA), rotate(R, voronoi_cell(A[i], A))), 1e-10);
  }
}

TEST(NormalSetDistance, OrderInsensitive) {
  const HPolytope a(2, {UnitVec::basis(2, 0), UnitVec::basis(2, 1)});
  const HPolytope b(2, {UnitVec::basis(2, 1), UnitVec::basis(2, 0)});
  EXPECT_EQ(normal_set_distance(a, b), 0.0);
  EXPECT_TRUE(std::isinf(normal_set_distance(a, HPolytope(2, {UnitVec::basis(2, 0)}))));
}
