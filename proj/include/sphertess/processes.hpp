#pragma once

// Poisson point processes on S^d and the tessellations they induce: great
// subsphere (hyperplane) arrangements and spherical Voronoi tessellations.

#include <cstdint>
#include <vector>

#include "sphertess/spherical_convex.hpp"

namespace sphertess {

/// Poisson(gamma_s * omega_{d+1}) many iid uniform points.
std::vector<UnitVec> sample_poisson(double gamma_s, int d, Rng& rng);
std::vector<UnitVec> sample_poisson(double gamma_s, int d, std::uint64_t seed);

/// Cell of the arrangement {x^perp} containing `origin`: normals sign(<o, x>) x.
/// Throws Degenerate when some |<o, x>| < 1e-12.
HPolytope crofton_cell(const std::vector<UnitVec>& points, const UnitVec& origin);

enum class TessellationKind { Hyperplane, Voronoi };

struct Tessellation {
  int dim = 2;
  std::vector<UnitVec> generators;
  std::vector<HPolytope> cells;
  TessellationKind kind = TessellationKind::Hyperplane;
};

/// All cells of the arrangement of great circles with the given normals
/// (d = 2). Cells are found from the four sign patterns around every
/// intersection vertex and cross-checked with random seeds; the result is
/// certified by comparing the count with schlafli_count(2, k). Throws
/// Degenerate for non-generic input or when the certificate fails.
Tessellation tessellation_cells(const std::vector<UnitVec>& normals, int d, std::uint64_t seed);

/// Rotation sending the origin to the cell centre used for recentring: the
/// circumcentre of proper cells, the Chebyshev centre otherwise. The free
/// rotation about the origin is drawn from rng.
Rotation centring_rotation(const HPolytope& cell, Rng& rng);

/// The cell rotated so that its centre sits at the spherical origin.
HPolytope recentre(const HPolytope& cell, Rng& rng);

/// A uniformly chosen cell of `tess`, recentred.
HPolytope typical_cell(const Tessellation& tess, Rng& rng);

/// C(x, A) with normals normalize(x - z), z in A \ {x}.
HPolytope voronoi_cell(const UnitVec& x, const std::vector<UnitVec>& A);

/// Crofton cell at `origin` of the bisector process {(x - o)^perp : x in X}.
HPolytope bisector_crofton_cell(const std::vector<UnitVec>& X, const UnitVec& origin);

struct VoronoiTypicalSample {
  std::vector<UnitVec> points;  // realization of X (without the origin)
  HPolytope voronoi;            // C(o, X + delta_o)
  HPolytope bisector;           // Crofton cell of the bisector process
};

/// One realization of the typical Voronoi cell at the spherical origin, built both ways.
VoronoiTypicalSample voronoi_typical_sample(double gamma_s, int d, Rng& rng);

/// C(o, X + delta_o) for a fresh realization.
HPolytope voronoi_typical_cell(double gamma_s, int d, std::uint64_t seed);

/// Largest coordinate difference between two normal sets after sorting;
/// +inf when the sizes differ.
double normal_set_distance(const HPolytope& a, const HPolytope& b);

/// Voronoi cells of every point.
Tessellation voronoi_tessellation(const std::vector<UnitVec>& points, int d);

}  // namespace sphertess
