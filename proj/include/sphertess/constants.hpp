#pragma once

// Explicit stability constants, the h_m family, Schlaefli's region count and
// the inequality verifiers built on them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sphertess/functionals.hpp"

namespace sphertess {

/// beta(alpha0, alphaC, d) for the L2 stability inequality; 0 < alpha0 <= alphaC < pi/2.
double beta_stability(double alpha0, double alphaC, int d);

/// Simplified lower bound min{ sin^{d+1} a0 / (tan^{2d} aC + 2d tan^d aC), 0.4^d (pi/2 - aC)^d }.
double beta_stability_bound(double alpha0, double alphaC, int d);

/// (1/8) (3 pi^-4)^{d-1} a^{d-2} (pi/2 - a)^{d-1}, a in (0, pi/2).
double c_inradius(double a, int d);

/// 4 * 0.03^d a^{d-2} (pi/2 - a)^{d-1}.
double c_inradius_bound(double a, int d);

/// (2 pi)^{-2d} a^{-1} min{a, pi/2 - a}^{d-1}, a in (0, pi/2).
double c_voronoi(double a, int d);

/// beta-bar(a, d) with alpha0 the radius of the cap of volume a; a in (0, omega_{d+1}/2).
double beta_bar(double a, int d);

/// h_m(t) = (-1)^{m+1} e^{-t} + 2 sum_{i=0}^{floor(m/2)} t^{m-2i} / (m-2i)!.
double h_m(int m, double t);

/// Number of regions cut out by k great subspheres in general position on S^d.
std::uint64_t schlafli_count(int d, int k);

enum class StabilityKind { VolumeDelta2, InradiusThetaR, VoronoiThetaO };

std::string_view to_string(StabilityKind kind) noexcept;
std::optional<StabilityKind> parse_stability_kind(std::string_view name) noexcept;

enum class Verdict { Holds, HoldsWithinError, InconclusiveUpperBoundDeviation, Violated };

std::string_view to_string(Verdict v) noexcept;

/// holds: lhs - rhs > 3 s; holds-within-error: |lhs - rhs| <= 3 s; violated otherwise,
/// with s the combined standard error.
Verdict classify(const Estimate& lhs, const Estimate& rhs);

struct StabilityReport {
  std::string body_id;
  std::string kind;
  Estimate lhs;
  Estimate rhs;
  double constant = 0.0;
  double deviation = 0.0;
  double size = 0.0;  // a used on the right-hand side
  Verdict verdict = Verdict::HoldsWithinError;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

struct StabilityParams {
  std::optional<double> a;        // default: the body's own size
  std::optional<double> epsilon;  // default: min(deviation, 1)
  std::optional<double> alpha0;   // VolumeDelta2 only; default alpha_C
  std::optional<UnitVec> origin;  // VoronoiThetaO centre; default the spherical origin
  std::string body_id;
  DeviationOptions deviation;
};

/// U_1(P) against U_1 of the cap of equal volume. n == 0 with d == 2 uses exact values.
StabilityReport verify_urysohn(const HPolytope& P, std::size_t n, std::uint64_t seed, std::string body_id = {});

/// Throws PreconditionFailed when the kind-specific hypotheses do not hold.
StabilityReport verify_stability(StabilityKind kind, const HPolytope& P, const StabilityParams& params, std::size_t n,
                                 std::uint64_t seed);

/// (1 + f) tau(a) for an externally supplied f in [0, 1].
struct StabilityFloor {
  double a;
  double epsilon;
  double f;
  double tau;
  double floor;
};

StabilityFloor stability_floor(TauModel model, int d, double a, double epsilon, double f);

}  // namespace sphertess
