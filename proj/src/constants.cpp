#include "sphertess/constants.hpp"

#include <cmath>
#include <sstream>

namespace sphertess {

namespace {

void require_dim(int d) {
  if (d < 2) throw GeometryError(ErrorKind::OutOfRange, "d must be at least 2");
}

void require_radius(double a) {
  if (!(a > 0.0 && a < kHalfPi)) throw GeometryError(ErrorKind::OutOfRange, "a must lie in (0, pi/2)");
}

double binom2(int d) { return 0.5 * d * (d + 1); }

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Estimate hitting_estimate(const VPolytope& K, std::size_t n, std::uint64_t seed, const HPolytope& P) {
  if (n == 0) {
    if (P.dim() != 2) throw GeometryError(ErrorKind::OutOfRange, "exact U1 is available for d = 2 only");
    return Estimate::exact(U1_exact_2d(P));
  }
  return U1(K, n, seed);
}

}  // namespace

double beta_stability(double alpha0, double alphaC, int d) {
  require_dim(d);
  if (!(alpha0 > 0.0 && alpha0 <= alphaC && alphaC < kHalfPi)) {
    throw GeometryError(ErrorKind::OutOfRange, "need 0 < alpha0 <= alphaC < pi/2");
  }
  const double b = binom2(d);
  const double t = std::tan(alphaC);
  const double first = b * std::pow(std::sin(alpha0), d + 1) * std::pow(t, -2.0 * d) /
                       (d + d * b * kHalfPi * kHalfPi * std::pow(t, -static_cast<double>(d)));
  const double second = (4.0 / (kPi * kPi)) * sine_integral_D(d, kHalfPi - alphaC);
  return 2.0 * std::min(first, second);
}

double beta_stability_bound(double alpha0, double alphaC, int d) {
  require_dim(d);
  if (!(alpha0 > 0.0 && alpha0 <= alphaC && alphaC < kHalfPi)) {
    throw GeometryError(ErrorKind::OutOfRange, "need 0 < alpha0 <= alphaC < pi/2");
  }
  const double t = std::tan(alphaC);
  const double first = std::pow(std::sin(alpha0), d + 1) / (std::pow(t, 2 * d) + 2.0 * d * std::pow(t, d));
  const double second = std::pow(0.4, d) * std::pow(kHalfPi - alphaC, d);
  return std::min(first, second);
}

double c_inradius(double a, int d) {
  require_dim(d);
  require_radius(a);
  return 0.125 * std::pow(3.0 / std::pow(kPi, 4), d - 1) * std::pow(a, d - 2) * std::pow(kHalfPi - a, d - 1);
}

double c_inradius_bound(double a, int d) {
  require_dim(d);
  require_radius(a);
  return 4.0 * std::pow(0.03, d) * std::pow(a, d - 2) * std::pow(kHalfPi - a, d - 1);
}

double c_voronoi(double a, int d) {
  require_dim(d);
  require_radius(a);
  return std::pow(2.0 * kPi, -2.0 * d) / a * std::pow(std::min(a, kHalfPi - a), d - 1);
}

double beta_bar(double a, int d) {
  require_dim(d);
  const double w1 = omega(d + 1);
  const double wd = omega(d);
  if (!(a > 0.0 && a < 0.5 * w1)) throw GeometryError(ErrorKind::OutOfRange, "a must lie in (0, omega_{d+1}/2)");
  const double alpha0 = cap_radius_for_volume(d, a);
  const double b = binom2(d);
  const double q = w1 / (2.0 * kPi * wd);
  const double first = b * std::pow(std::sin(alpha0), d + 1) * std::pow(q, 2 * d) /
                       (d + d * b * kHalfPi * kHalfPi * std::pow(std::tan(alpha0), -static_cast<double>(d)));
  const double second = std::pow(2.0 / kPi, d + 1) * std::pow(w1, d) / (d * std::pow(2.0 * kPi * wd, d));
  return 2.0 * std::min(first, second);
}

double h_m(int m, double t) {
  if (m < 0) throw GeometryError(ErrorKind::OutOfRange, "m must be nonnegative");
  if (!(t >= 0.0)) throw GeometryError(ErrorKind::OutOfRange, "t must be nonnegative");
  // term[k] = t^k / k!
  std::vector<double> term(static_cast<std::size_t>(m + 1));
  term[0] = 1.0;
  for (int k = 1; k <= m; ++k) term[k] = term[k - 1] * t / k;
  double sum = 0.0;
  for (int k = m; k >= 0; k -= 2) sum += term[k];
  const double sign = (m % 2 == 0) ? -1.0 : 1.0;
  return sign * std::exp(-t) + 2.0 * sum;
}

std::uint64_t schlafli_count(int d, int k) {
  if (d < 1 || k < 0) throw GeometryError(ErrorKind::OutOfRange, "need d >= 1 and k >= 0");
  if (k == 0) return 1;
  std::uint64_t total = 0;
  const std::uint64_t n = static_cast<std::uint64_t>(k - 1);
  std::uint64_t c = 1;  // C(n, i)
  for (int i = 0; i <= d && static_cast<std::uint64_t>(i) <= n; ++i) {
    total += c;
    c = c * (n - i) / (i + 1);
  }
  return 2 * total;
}

// --------------------------------------------------------------- verdicts

std::string_view to_string(StabilityKind kind) noexcept {
  switch (kind) {
    case StabilityKind::VolumeDelta2: return "VolumeDelta2";
    case StabilityKind::InradiusThetaR: return "InradiusThetaR";
    case StabilityKind::VoronoiThetaO: return "VoronoiThetaO";
  }
  return "?";
}

std::optional<StabilityKind> parse_stability_kind(std::string_view name) noexcept {
  for (auto k : {StabilityKind::VolumeDelta2, StabilityKind::InradiusThetaR, StabilityKind::VoronoiThetaO}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::HoldsWithinError: return "holds-within-error";
    case Verdict::InconclusiveUpperBoundDeviation: return "inconclusive-upper-bound-deviation";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

Verdict classify(const Estimate& lhs, const Estimate& rhs) {
  const double diff = lhs.value - rhs.value;
  // A floor keeps exact comparisons from tripping over rounding.
  const double margin = 3.0 * combined_std_error(lhs, rhs) + 1e-12 * std::max(1.0, std::abs(rhs.value));
  if (diff > margin) return Verdict::Holds;
  if (diff >= -margin) return Verdict::HoldsWithinError;
  return Verdict::Violated;
}

nlohmann::json StabilityReport::to_json() const {
  auto est = [](const Estimate& e) {
    return nlohmann::json{{"value", e.value}, {"stderr", e.std_error}, {"n", e.n}, {"seed", e.seed}};
  };
  return {{"body_id", body_id},     {"kind", kind},           {"lhs", est(lhs)},
          {"rhs", est(rhs)},        {"constant", constant},   {"deviation", deviation},
          {"a", size},              {"verdict", std::string(to_string(verdict))}};
}

std::string StabilityReport::csv_header() { return "body_id,kind,lhs,lhs_se,rhs,rhs_se,verdict"; }

std::string StabilityReport::csv_row() const {
  return body_id + "," + kind + "," + fmt17(lhs.value) + "," + fmt17(lhs.std_error) + "," + fmt17(rhs.value) + "," +
         fmt17(rhs.std_error) + "," + std::string(to_string(verdict));
}

// -------------------------------------------------------------- verifiers

StabilityReport verify_urysohn(const HPolytope& P, std::size_t n, std::uint64_t seed, std::string body_id) {
  const int d = P.dim();
  const VPolytope K = vertices(P);
  if (!K.proper()) throw GeometryError(ErrorKind::Improper, "verify_urysohn needs a proper body");
  const Estimate vol = cell_volume(P, std::max<std::size_t>(n, 1), derive_seed(seed, 1));
  const double alpha = cap_radius_for_volume(d, vol.value);
  const double w1 = omega(d + 1);
  // d U1(cap) / d volume at the cap radius.
  const double slope = std::pow(std::cos(alpha), d - 1) / (w1 * std::pow(std::sin(alpha), d - 1));

  StabilityReport r;
  r.body_id = std::move(body_id);
  r.kind = "Urysohn";
  r.lhs = hitting_estimate(K, n, seed, P);
  r.rhs = {cap_U1(d, alpha), slope * vol.std_error, vol.n, vol.seed};
  r.size = vol.value;
  r.verdict = classify(r.lhs, r.rhs);
  return r;
}

StabilityReport verify_stability(StabilityKind kind, const HPolytope& P, const StabilityParams& params, std::size_t n,
                                 std::uint64_t seed) {
  const int d = P.dim();
  const double power = 0.5 * (d + 1);
  StabilityReport r;
  r.body_id = params.body_id;
  r.kind = std::string(to_string(kind));

  switch (kind) {
    case StabilityKind::VolumeDelta2: {
      const VPolytope K = vertices(P);
      if (!K.proper()) throw GeometryError(ErrorKind::PreconditionFailed, "body is not proper");
      const Estimate vol = cell_volume(P, std::max<std::size_t>(n, 1), derive_seed(seed, 1));
      if (!(vol.value > 0.0)) throw GeometryError(ErrorKind::PreconditionFailed, "body has zero volume");
      const double alphaC = cap_radius_for_volume(d, vol.value);
      if (!(alphaC < kHalfPi)) throw GeometryError(ErrorKind::PreconditionFailed, "equal-volume cap is not proper");
      const double alpha0 = params.alpha0.value_or(alphaC);
      if (!(alpha0 > 0.0 && alpha0 <= alphaC)) throw GeometryError(ErrorKind::PreconditionFailed, "need 0 < alpha0 <= alphaC");
      ShapeDeviation dev;
      try {
        dev = shape_deviation(P, params.deviation);
      } catch (const GeometryError& e) {
        if (e.kind() != ErrorKind::Improper) throw;
        throw GeometryError(ErrorKind::PreconditionFailed, "no admissible centre");
      }
      const double beta = beta_stability(alpha0, alphaC, d);
      const double base = cap_U1(d, alphaC);
      const double factor = 1.0 + beta * dev.delta2 * dev.delta2;
      const double slope = std::pow(std::cos(alphaC), d - 1) / (omega(d + 1) * std::pow(std::sin(alphaC), d - 1));
      r.lhs = hitting_estimate(K, n, seed, P);
      r.rhs = {factor * base, factor * slope * vol.std_error, vol.n, vol.seed};
      r.constant = beta;
      r.deviation = dev.delta2;
      r.size = vol.value;
      r.verdict = classify(r.lhs, r.rhs);
      if (r.verdict == Verdict::Violated) {
        // Only the baseline U1(K) >= U1(C) is conclusive; the deviation term uses an upper bound.
        const Estimate baseline{base, slope * vol.std_error, vol.n, vol.seed};
        if (classify(r.lhs, baseline) != Verdict::Violated) r.verdict = Verdict::InconclusiveUpperBoundDeviation;
      }
      return r;
    }
    case StabilityKind::InradiusThetaR: {
      const Inball ball = inradius_free(P);
      const VPolytope K = vertices(P);
      const double theta = centred_circumradius(K, ball.center) - ball.radius;
      const double a = params.a.value_or(ball.radius);
      const double eps = params.epsilon.value_or(std::min(theta, 1.0));
      if (!(a > 0.0 && a < kHalfPi)) throw GeometryError(ErrorKind::PreconditionFailed, "a must lie in (0, pi/2)");
      if (ball.radius < a - 1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "inradius below a");
      if (eps < 0.0 || theta < eps - 1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "theta_r below epsilon");
      const double c = c_inradius(a, d);
      r.lhs = hitting_estimate(K, n, seed, P);
      r.rhs = Estimate::exact((1.0 + c * std::pow(eps, power)) * cap_U1(d, a));
      r.constant = c;
      r.deviation = theta;
      r.size = a;
      r.verdict = classify(r.lhs, r.rhs);
      return r;
    }
    case StabilityKind::VoronoiThetaO: {
      const UnitVec o = params.origin.value_or(UnitVec::origin(d));
      if (o.dim() != d) throw GeometryError(ErrorKind::DimensionMismatch, "origin dimension");
      if (min_slack(P, o) < -1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "origin is outside the body");
      const VPolytope K = vertices(P);
      for (const auto& v : K.vertices()) {
        if (v.dot(o) < -1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "body leaves the hemisphere of the origin");
      }
      const double r_o = centred_inradius(P, o);
      const double theta = centred_circumradius(K, o) - r_o;
      const double a = params.a.value_or(r_o);
      const double eps = params.epsilon.value_or(std::min(theta, 1.0));
      if (!(a > 0.0 && a < kHalfPi)) throw GeometryError(ErrorKind::PreconditionFailed, "a must lie in (0, pi/2)");
      if (r_o < a - 1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "centred inradius below a");
      if (eps < 0.0 || theta < eps - 1e-12) throw GeometryError(ErrorKind::PreconditionFailed, "theta_o below epsilon");
      if (n == 0) throw GeometryError(ErrorKind::OutOfRange, "VoronoiThetaO needs Monte Carlo samples");
      const double c = c_voronoi(a, d);
      r.lhs = U_tilde(K, o, n, seed);
      r.rhs = Estimate::exact((1.0 + c * std::pow(eps, power)) * cap_volume(d, 2.0 * a));
      r.constant = c;
      r.deviation = theta;
      r.size = a;
      r.verdict = classify(r.lhs, r.rhs);
      return r;
    }
  }
  throw GeometryError(ErrorKind::OutOfRange, "unknown stability kind");
}

StabilityFloor stability_floor(TauModel model, int d, double a, double epsilon, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw GeometryError(ErrorKind::OutOfRange, "f must lie in [0, 1]");
  const double t = tau(model, d, a);
  return {a, epsilon, f, t, (1.0 + f) * t};
}

}  // namespace sphertess
