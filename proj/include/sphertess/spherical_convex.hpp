#pragma once

// Spherical polytopes in H- and V-representation.
//
// An HPolytope is {y in S^d : <y, n_j> >= 0 for all j}; an empty normal list
// is the whole sphere. A VPolytope is the spherical convex hull of its
// vertices, i.e. the trace on S^d of the cone they generate.

#include <cstddef>
#include <optional>
#include <vector>

#include "sphertess/sphere_core.hpp"

namespace sphertess {

class HPolytope {
 public:
  /// Whole-sphere sentinel on S^d.
  explicit HPolytope(int d) : dim_(d) {}

  /// Throws if a witness is given that is not strictly interior.
  HPolytope(int d, std::vector<UnitVec> normals, std::optional<UnitVec> witness = std::nullopt);

  static HPolytope whole_sphere(int d) { return HPolytope(d); }

  int dim() const noexcept { return dim_; }
  const std::vector<UnitVec>& normals() const noexcept { return normals_; }
  const std::optional<UnitVec>& witness() const noexcept { return witness_; }
  std::size_t size() const noexcept { return normals_.size(); }
  bool is_whole_sphere() const noexcept { return normals_.empty(); }

  /// Normals as the columns of a (d+1) x m matrix.
  Mat normal_matrix() const;

 private:
  int dim_;
  std::vector<UnitVec> normals_;
  std::optional<UnitVec> witness_;
};

class VPolytope {
 public:
  /// Deduplicates vertices (1e-9) and, for proper hulls, drops points that
  /// are nonnegative combinations of the others.
  VPolytope(int d, std::vector<UnitVec> vertices);

  int dim() const noexcept { return dim_; }
  const std::vector<UnitVec>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }

  /// Contained in an open hemisphere (the generated cone is line-free).
  bool proper() const noexcept { return proper_; }

  Mat vertex_matrix() const;

 private:
  int dim_;
  std::vector<UnitVec> vertices_;
  bool proper_ = false;
};

/// <y, n_j> >= -1e-12 for all constraints.
bool contains(const HPolytope& P, const UnitVec& y);

/// Minimum slack min_j <y, n_j> (+inf for the whole sphere).
double min_slack(const HPolytope& P, const UnitVec& y);

/// Point maximizing min_j <e, n_j> over the sphere; nullopt if the interior is empty.
std::optional<UnitVec> interior_point(const HPolytope& P);

struct VertexEnumeration {
  std::vector<UnitVec> vertices;
  std::size_t degenerate_subsets = 0;
  bool line_free = false;
};

/// Extreme rays of the cone by a scan over all d-subsets of normals.
/// Throws Infeasible when the body has empty interior.
VertexEnumeration enumerate_vertices(const HPolytope& P);

/// Vertex set of a proper body; throws Improper when the cone contains a line.
VPolytope vertices(const HPolytope& P);

/// Polar body {u : <u, x> <= 0 for all x in K}.
HPolytope polar(const VPolytope& K);
VPolytope polar(const HPolytope& P);

/// Whether the great subsphere x^perp meets the hull of K.
bool hits_great_subsphere(const VPolytope& K, const UnitVec& x);
bool hits_great_subsphere(const VPolytope& K, const Vec& x);

/// Geodesic distance from e to the boundary along the tangent direction u,
/// capped at pi/2. Requires e strictly interior and P inside the closed
/// hemisphere of e.
double radial_function(const HPolytope& P, const UnitVec& e, const Vec& u);

/// Unchecked variant for inner loops; `e_slacks[j]` caches <e, n_j>.
double radial_function_unchecked(const Mat& normals, const Vec& e_slacks, const Vec& u);

/// Geodesic distance from y to the body (0 inside).
double distance_to(const VPolytope& K, const UnitVec& y);

/// Whether y lies in the hull of K (within 1e-9 geodesic distance).
bool contains(const VPolytope& K, const UnitVec& y);

struct HausdorffEstimate {
  double distance;
  double mesh;  // largest spacing between consecutive boundary samples
};

/// Two-sided sampled Hausdorff distance. Each body is sampled at its vertices
/// and at `samples_per_edge` points on every edge (d = 2: polygon edges in
/// cyclic order; d >= 3: every vertex pair).
HausdorffEstimate hausdorff_distance(const VPolytope& K, const VPolytope& Q, int samples_per_edge = 16);

/// Greedy farthest-point subset of at most k vertices of P.
VPolytope simplify_vertices(const VPolytope& P, int k);

/// Vertices of a proper d = 2 polygon in counter-clockwise order around their
/// normalized centroid.
std::vector<UnitVec> cyclic_order(const std::vector<UnitVec>& polygon);

/// Orthonormal basis of the tangent space at e (columns), anchored so that the
/// first column points towards `anchor` when it is not parallel to e.
Mat tangent_frame(const UnitVec& e, const std::optional<UnitVec>& anchor = std::nullopt);

/// Circumscribed polytope of a cap with `facets` tangent great subspheres
/// (d = 2 regular polygon, d = 3 Fibonacci directions). Radius pi/2 gives the
/// single-constraint hemisphere.
HPolytope cap_polytope(const Cap& cap, int facets);

/// Inscribed polytope of a cap with `count` boundary vertices.
VPolytope cap_vertex_polytope(const Cap& cap, int count);

/// Apply a rotation to every normal / vertex.
HPolytope rotate(const Rotation& R, const HPolytope& P);
VPolytope rotate(const Rotation& R, const VPolytope& K);

}  // namespace sphertess
