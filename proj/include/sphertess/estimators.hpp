#pragma once

// Monte Carlo experiments on Crofton cells, typical cells and typical
// Voronoi cells. Every run is a deterministic function of its seed:
// replication i draws from derive_seed(seed, i) and results are merged in
// index order.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sphertess/functionals.hpp"
#include "sphertess/processes.hpp"

namespace sphertess {

/// Binomial proportion with its Wilson interval at the given z.
struct Proportion {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p = 0.0;
  double std_error = 0.0;  // sqrt(p (1 - p) / trials)
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

Proportion wilson(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// Sample mean with standard error sd / sqrt(n).
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_of(const std::vector<double>& values);

struct SimulationOptions {
  int d = 2;
  std::size_t volume_samples = 20000;  // Monte Carlo volume when d != 2
  std::size_t u1_samples = 20000;      // Monte Carlo U1 / U-tilde
  DeviationOptions deviation;
  std::size_t max_resamples = 64;      // per replication, on degenerate draws
};

enum class CellModel { HyperplaneCrofton, HyperplaneTypical, VoronoiTypical };
enum class DeviationKind { Delta2, ThetaR, ThetaO, Canonical };

std::string_view to_string(CellModel m) noexcept;
std::string_view to_string(DeviationKind k) noexcept;
std::optional<CellModel> parse_cell_model(std::string_view name) noexcept;
std::optional<DeviationKind> parse_deviation_kind(std::string_view name) noexcept;

/// Value of the size functional; CentredInradius is measured at spec.origin
/// (the spherical origin when unset).
double size_of(const SizeSpec& spec, const HPolytope& P, const SimulationOptions& opts, std::uint64_t seed);

/// Deviation of a cell, or nullopt where it is undefined (improper cells, or
/// ThetaO when the cell leaves the hemisphere of the origin).
std::optional<double> deviation_of(DeviationKind kind, CellModel model, const SizeSpec& spec, double a,
                                   const HPolytope& P, const SimulationOptions& opts, std::uint64_t seed);

/// Crofton cell at `origin` of a fresh Poisson hyperplane process; degenerate
/// draws are redrawn from derived seeds. Returns the number of redraws too.
struct CroftonDraw {
  HPolytope cell;
  std::size_t points;
  std::size_t redraws;
};
CroftonDraw draw_crofton_cell(double gamma_s, const UnitVec& origin, std::uint64_t seed, std::size_t max_resamples);

struct TessellationDraw {
  Tessellation tess;
  std::size_t redraws;
};
TessellationDraw draw_tessellation(double gamma_s, std::uint64_t seed, std::size_t max_resamples);

struct ConditionalResult {
  Proportion conditional;          // joint / conditioning
  std::uint64_t units = 0;         // cells examined
  std::uint64_t conditioning = 0;  // Sigma >= a
  std::uint64_t joint = 0;         // Sigma >= a and deviation >= eps
  std::uint64_t undefined = 0;     // Sigma >= a but deviation undefined (excluded)
  std::uint64_t redraws = 0;
  bool starved = false;            // no conditioning success
};

/// Rejection estimator of P(dev >= eps | Sigma >= a). HyperplaneTypical pools
/// every cell of each realization (a ratio estimator for the typical cell).
ConditionalResult estimate_conditional_deviation(CellModel model, const SizeSpec& size, DeviationKind dev, double a,
                                                 double epsilon, double gamma_s, std::size_t n, std::uint64_t seed,
                                                 const SimulationOptions& opts = {});

struct LowerBoundReport {
  Proportion p;
  double rhs = 0.0;  // exp(-gamma omega tau(a))
  double tau = 0.0;
  std::uint64_t redraws = 0;
  bool pass = false;  // p + 3 se >= rhs
};

LowerBoundReport check_zero_cell_lower_bound(const SizeSpec& size, double a, double gamma_s, std::size_t n,
                                             std::uint64_t seed, const SimulationOptions& opts = {});

struct RatePoint {
  double gamma_s = 0.0;
  Proportion p;
  double log_rate = 0.0;  // ln p / gamma_s (-inf when p = 0)
  bool starved = false;   // fewer than 10 successes
  double lower_bound = 0.0;
  bool lower_bound_holds = false;
  std::uint64_t redraws = 0;
};

struct RateCurve {
  std::vector<RatePoint> points;
  double target = 0.0;           // -omega_{d+1} tau(a)
  bool decreasing = false;       // log rates strictly decrease along the grid (non-starved points)
  bool lower_bounds_hold = false;
  double final_relative_error = 0.0;
};

RateCurve estimate_rate(const SizeSpec& size, double a, const std::vector<double>& gammas, std::size_t n,
                        std::uint64_t seed, const SimulationOptions& opts = {});

struct CellCountReport {
  MeanEstimate count;
  double target = 0.0;  // h_2(gamma omega_3)
  std::uint64_t redraws = 0;
  std::uint64_t certificate_failures = 0;  // realizations whose count differed from N(k)
  bool pass = false;
};

CellCountReport check_cell_count(double gamma_s, std::size_t n, std::uint64_t seed, const SimulationOptions& opts = {});

enum class TypicalFunctional { One, Volume, U1, VolumeIndicator };

std::string_view to_string(TypicalFunctional f) noexcept;
std::optional<TypicalFunctional> parse_typical_functional(std::string_view name) noexcept;

struct TypicalIdentityReport {
  MeanEstimate lhs;  // E f(Z_0)
  MeanEstimate rhs;  // E sum_cells f(K) sigma(K) / omega_3
  std::uint64_t redraws = 0;
  bool pass = false;
};

/// `a` is the threshold of VolumeIndicator and ignored otherwise.
TypicalIdentityReport check_typical_identity(TypicalFunctional f, double a, double gamma_s, std::size_t n,
                                             std::uint64_t seed, const SimulationOptions& opts = {});

struct VoronoiTailReport {
  Proportion p;     // 95% Wilson
  Proportion band;  // 3-sigma Wilson
  double target = 0.0;
  bool pass = false;  // target inside the 3-sigma band
};

VoronoiTailReport check_voronoi_tail(double a, double gamma_s, int d, std::size_t n, std::uint64_t seed);

struct BisectorIdentityReport {
  std::size_t realizations = 0;
  std::size_t mismatches = 0;
  double worst = 0.0;
};

/// Per-realization comparison of the Voronoi and bisector-Crofton constructions.
BisectorIdentityReport check_bisector_identity(double gamma_s, int d, std::size_t n, std::uint64_t seed,
                                               double tol = 1e-10);

}  // namespace sphertess
