#pragma once

// Size, hitting and deviation functionals of spherical polytopes.

#include <cstdint>
#include <optional>
#include <string_view>

#include "sphertess/spherical_convex.hpp"

namespace sphertess {

/// Monte Carlo result. n == 0 marks an exact evaluation (std_error 0).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  static Estimate exact(double v) { return {v, 0.0, 0, 0}; }
  bool is_exact() const noexcept { return n == 0; }
};

/// sqrt(a.se^2 + b.se^2)
double combined_std_error(const Estimate& a, const Estimate& b);

enum class SizeKind { Volume, Inradius, CentredInradius };

std::string_view to_string(SizeKind kind) noexcept;
std::optional<SizeKind> parse_size_kind(std::string_view name) noexcept;

struct SizeSpec {
  SizeKind kind = SizeKind::Volume;
  std::optional<UnitVec> origin;  // required for CentredInradius
};

// ------------------------------------------------------------------ volume

/// omega_{d+1} times the fraction of n uniform points inside P.
Estimate volume(const HPolytope& P, std::size_t n, std::uint64_t seed);

/// Exact area of a d = 2 body (whole sphere, hemisphere, lune or polygon);
/// nullopt for d != 2.
std::optional<double> exact_area(const HPolytope& P);

/// Exact area when d = 2, otherwise `volume(P, n, seed)`.
Estimate cell_volume(const HPolytope& P, std::size_t n, std::uint64_t seed);

/// Area of a proper d = 2 polygon given its vertices (any order).
double polygon_area(const std::vector<UnitVec>& polygon);

// ---------------------------------------------------------------- hitting

/// Half the fraction of uniform x whose great subsphere x^perp meets K.
Estimate U1(const VPolytope& K, std::size_t n, std::uint64_t seed);

/// 1/2 - sigma_d(K*) / omega_{d+1}. With n == 0 and d == 2 the polar area is
/// exact; otherwise it is estimated from n samples.
Estimate U1_exact_via_polar(const VPolytope& K, std::size_t n, std::uint64_t seed);

/// Exact U_1 of any d = 2 H-body (1/2 for improper bodies).
double U1_exact_2d(const HPolytope& P);

/// omega_{d+1} times the fraction of uniform x whose bisector (x - e)^perp
/// meets K. Requires e in K and K inside the closed hemisphere of e.
Estimate U_tilde(const VPolytope& K, const UnitVec& e, std::size_t n, std::uint64_t seed);

// ------------------------------------------------------------------ radii

/// min_j arcsin <e, n_j>, capped at pi/2 (pi/2 for the whole sphere).
double centred_inradius(const HPolytope& P, const UnitVec& e);

/// max over vertices of the geodesic distance to e.
double centred_circumradius(const VPolytope& K, const UnitVec& e);

struct Ball {
  double radius;
  UnitVec center;
};

struct Inball {
  double radius;
  UnitVec center;
  /// All vertices lie in the closed hemisphere of the centre (1e-9).
  bool body_in_hemisphere;
};

/// Spherical Chebyshev centre: maximizes min_j <e, n_j> over S^d, solved as a
/// least-distance program min ||x|| s.t. <x, n_j> >= 1.
Inball inradius_free(const HPolytope& P);

/// Smallest enclosing cap of a proper body (same program on the vertices).
Ball circumball(const VPolytope& K);

/// R_e - r_e at the Chebyshev centre.
double theta_r(const HPolytope& P);

/// R_e - r_e for a given centre e in P (requires P line-free).
double theta_centred(const HPolytope& P, const UnitVec& e);

// -------------------------------------------------------------- deviation

struct DeviationOptions {
  int grid = 512;                    // angular nodes on S_e (d = 2); Fibonacci nodes for d = 3
  std::size_t fk_samples = 20000;    // Monte Carlo points for F_K when d = 3
  std::uint64_t seed = 0x5eed;
  int descent_iterations = 300;
};

struct ShapeDeviation {
  double delta2;        // upper approximation of Delta_2
  double delta0;        // upper approximation of Delta_0
  UnitVec delta2_center;
  UnitVec delta0_center;
  int candidates;       // centres evaluated
};

/// L2 deviation of D o alpha_{P,e} from its mean over S_e, on the node grid.
double radial_l2_deviation(const HPolytope& P, const UnitVec& e, const DeviationOptions& opts = {});

/// max alpha - min alpha = R_e - r_e for e interior with P in the open hemisphere of e.
double radial_range(const HPolytope& P, const UnitVec& e);

/// F_K(e) = int_K <e, u>^{-(d+1)} sigma_d(du), the volume of the gnomonic image.
double gnomonic_volume(const HPolytope& P, const UnitVec& e, const DeviationOptions& opts = {});

/// Minimizes over candidate centres (incentre, circumcentre, minimizer of
/// F_K), each refined by Nelder-Mead on both objectives.
ShapeDeviation shape_deviation(const HPolytope& P, const DeviationOptions& opts = {});

double delta2(const HPolytope& P, const DeviationOptions& opts = {});
double delta0(const HPolytope& P, const DeviationOptions& opts = {});

struct CanonicalDeviation {
  double value;                  // phi / tau - 1
  bool size_condition_violated;  // value < 0: K cannot satisfy Sigma(K) >= a
};

CanonicalDeviation canonical_deviation(double phi_value, double tau_value);

// ------------------------------------------------------------ isoperimetry

enum class TauModel { VolumeU1, InradiusU1, VoronoiInradius };

std::string_view to_string(TauModel model) noexcept;

/// Minimum of the hitting functional over bodies of size >= a (caps are extremal).
double tau(TauModel model, int d, double a);

/// Model whose tau belongs to the size functional when Phi = 2 U_1.
TauModel tau_model_for(SizeKind kind) noexcept;

}  // namespace sphertess
