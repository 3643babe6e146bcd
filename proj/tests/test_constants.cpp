#include <gtest/gtest.h>

#include <cmath>

#include "sphertess/constants.hpp"
#include "sphertess/processes.hpp"

using namespace sphertess;

namespace {

// Composite Simpson rule for int_0^x sin^{d-1}.
double D_simpson(int d, double x) {
  const int n = 20000;
  const double h = x / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(std::sin(i * h), d - 1);
  }
  return s * h / 3.0;
}

// The stability constant assembled from the intermediate constants of its derivation.
double beta_chain(double alpha0, double alphaC, int d) {
  const double C = d * (d + 1) / 2.0;
  const double D = D_simpson(d, kPi / 2.0 - alphaC);
  const double b1 = C * std::pow(std::tan(alphaC), -d);
  const double b2 = b1 / (1.0 + b1 * kPi * kPi / 4.0);
  const double b3 = std::min(b2 * std::pow(std::tan(alphaC), -d) * std::pow(std::sin(alpha0), d + 1) / (d * D),
                             std::pow(2.0 / kPi, 2));
  return 2.0 * D * b3;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

double h_direct(int m, double t) {
  double s = 0.0;
  for (int i = 0; 2 * i <= m; ++i) s += std::pow(t, m - 2 * i) / factorial(m - 2 * i);
  return std::pow(-1.0, m + 1) * std::exp(-t) + 2.0 * s;
}

// Central arrangements: N_d(k) = N_d(k-1) + N_{d-1}(k-1), N_d(1) = 2, N_0(k) = 2.
std::uint64_t regions_recursive(int d, int k) {
  if (k == 0) return 1;
  if (k == 1 || d == 0) return 2;
  return regions_recursive(d, k - 1) + regions_recursive(d - 1, k - 1);
}

HPolytope octant() { return HPolytope(2, {UnitVec::basis(2, 0), UnitVec::basis(2, 1), UnitVec::basis(2, 2)}); }

}  // namespace

TEST(Beta, MatchesDerivationChain) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.02, kHalfPi - 0.02);
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + i % 4;
    double a0 = u(rng), aC = u(rng);
    if (a0 > aC) std::swap(a0, aC);
    const double b = beta_stability(a0, aC, d);
    EXPECT_NEAR(b, beta_chain(a0, aC, d), 1e-9 * b) << d << " " << a0 << " " << aC;
  }
}

TEST(Beta, HandEvaluation) {
  // d = 2, alpha0 = alphaC = pi/4: 2 min{3 sin^3(pi/4) / (2 + 6 (pi/2)^2), (2/pi)^2 (1 - cos(pi/4))}
  const double s3 = std::pow(std::sqrt(0.5), 3);
  const double first = 3.0 * s3 / (2.0 + 6.0 * kPi * kPi / 4.0);
  const double second = 4.0 / (kPi * kPi) * (1.0 - std::sqrt(0.5));
  EXPECT_NEAR(beta_stability(kPi / 4, kPi / 4, 2), 2.0 * std::min(first, second), 1e-14);
  EXPECT_NEAR(beta_stability(kPi / 4, kPi / 4, 2), 0.126236, 1e-6);
}

TEST(Beta, AtLeastSimplifiedBound) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(1e-3, kHalfPi - 1e-3);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    double a0 = u(rng), aC = u(rng);
    if (a0 > aC) std::swap(a0, aC);
    EXPECT_GE(beta_stability(a0, aC, d), beta_stability_bound(a0, aC, d));
    EXPECT_GT(beta_stability_bound(a0, aC, d), 0.0);
  }
}

TEST(Beta, DecaysAsCapApproachesHemisphere) {
  for (int d = 2; d <= 4; ++d) {
    double prev = beta_stability(0.3, 0.3, d);
    for (double aC = 0.35; aC < kHalfPi; aC += 0.05) {
      const double b = beta_stability(0.3, aC, d);
      EXPECT_LT(b, prev);
      prev = b;
    }
    EXPECT_LT(beta_stability(0.3, kHalfPi - 1e-6, d), 1e-12);
  }
}

TEST(Beta, ArgumentOrdering) {
  EXPECT_THROW(beta_stability(0.5, 0.4, 2), GeometryError);
  EXPECT_THROW(beta_stability(0.0, 0.4, 2), GeometryError);
  EXPECT_THROW(beta_stability(0.2, kHalfPi, 2), GeometryError);
  EXPECT_THROW(beta_stability_bound(0.5, 0.4, 2), GeometryError);
}

TEST(CInradius, Examples) {
  EXPECT_NEAR(c_inradius(0.3, 2), 0.125 * 3.0 / std::pow(kPi, 4) * (kHalfPi - 0.3), 1e-16);
  EXPECT_LT(c_inradius(kHalfPi - 1e-9, 2), 1e-10);
  for (int d = 2; d <= 6; ++d) {
    for (double a = 0.05; a < kHalfPi; a += 0.1) {
      EXPECT_GE(c_inradius(a, d), c_inradius_bound(a, d));
      EXPECT_GT(c_inradius_bound(a, d), 0.0);
    }
  }
  EXPECT_THROW(c_inradius(0.0, 2), GeometryError);
  EXPECT_THROW(c_inradius(kHalfPi, 2), GeometryError);
}

TEST(CVoronoi, Examples) {
  EXPECT_NEAR(c_voronoi(0.3, 2), std::pow(2.0 * kPi, -4), 1e-18);
  for (int d = 2; d <= 5; ++d) {
    // a * c(a, d) is maximized where min{a, pi/2 - a} is, at a = pi/4.
    const double peak = kPi / 4 * c_voronoi(kPi / 4, d);
    for (double a = 0.05; a < kHalfPi; a += 0.05) {
      EXPECT_GT(c_voronoi(a, d), 0.0);
      EXPECT_LE(a * c_voronoi(a, d), peak * (1.0 + 1e-12));
    }
  }
  EXPECT_THROW(c_voronoi(1.6, 2), GeometryError);
}

TEST(BetaBar, PositiveAndMonotone) {
  for (int d = 2; d <= 4; ++d) {
    const double half = 0.5 * omega(d + 1);
    double prev = 0.0;
    for (int i = 1; i < 40; ++i) {
      const double b = beta_bar(half * i / 40.0, d);
      EXPECT_GT(b, 0.0);
      EXPECT_GE(b, prev);
      prev = b;
    }
  }
  EXPECT_THROW(beta_bar(0.0, 2), GeometryError);
  EXPECT_THROW(beta_bar(2.0 * kPi, 2), GeometryError);
}

TEST(BetaBar, HandEvaluation) {
  // d = 2 at alpha0 = pi/4: q = omega_3 / (2 pi omega_2) = 1 / pi.
  const double a = 2.0 * kPi * (1.0 - std::cos(kPi / 4));
  const double q = 1.0 / kPi;
  const double first = 3.0 * std::pow(std::sin(kPi / 4), 3) * std::pow(q, 4) / (2.0 + 6.0 * kPi * kPi / 4.0);
  const double second = std::pow(2.0 / kPi, 3) * std::pow(4.0 * kPi, 2) / (2.0 * std::pow(4.0 * kPi * kPi, 2));
  EXPECT_NEAR(beta_bar(a, 2), 2.0 * std::min(first, second), 1e-12 * beta_bar(a, 2));
}

TEST(Hm, Examples) {
  for (double t : {0.0, 0.5, 3.0, 9.0}) EXPECT_NEAR(h_m(0, t), 2.0 - std::exp(-t), 1e-15);
  for (int m = 0; m <= 8; ++m) EXPECT_NEAR(h_m(m, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(h_m(2, 4.0), 18.0 - std::exp(-4.0), 1e-12);
  EXPECT_NEAR(h_m(2, 4.0), 17.981684, 1e-6);
  for (int m = 0; m <= 8; ++m) {
    for (double t = 0.0; t <= 10.0; t += 0.25) EXPECT_NEAR(h_m(m, t), h_direct(m, t), 1e-12 * h_direct(m, t));
  }
  EXPECT_THROW(h_m(-1, 1.0), GeometryError);
  EXPECT_THROW(h_m(2, -0.1), GeometryError);
}

TEST(Hm, PropertySuite) {
  const double step = 1e-5;
  for (int m = 0; m <= 8; ++m) {
    double prev = h_m(m, 0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double t = 10.0 * i / 1000.0;
      const double h = h_m(m, t);
      EXPECT_GE(h, 1.0);
      EXPECT_GT(h, prev);
      prev = h;
      double partial = 0.0;
      for (int k = 0; k <= m; ++k) partial += std::pow(t, k) / factorial(k);
      EXPECT_GE(h - partial, -1e-12 * h);
      EXPECT_LE(h - partial, std::pow(t, m) / factorial(m) + 1e-12 * h);
      if (m >= 1 && t >= step) {
        const double deriv = (h_m(m, t + step) - h_m(m, t - step)) / (2.0 * step);
        EXPECT_LE(std::abs(deriv - h_m(m - 1, t)), 1e-4 * h_m(m - 1, t)) << m << " " << t;
        const double second = h_m(m, t + 0.01) - 2.0 * h + h_m(m, t - 0.01);
        EXPECT_GE(second, -1e-8);
      }
    }
  }
}

TEST(Schlafli, Examples) {
  for (int d = 1; d <= 5; ++d) {
    EXPECT_EQ(schlafli_count(d, 0), 1u);
    EXPECT_EQ(schlafli_count(d, 1), 2u);
  }
  EXPECT_EQ(schlafli_count(2, 3), 8u);
  EXPECT_EQ(schlafli_count(2, 4), 14u);
  EXPECT_THROW(schlafli_count(0, 3), GeometryError);
}

TEST(Schlafli, EulerAndRecursion) {
  // d = 2 from Euler's formula: V = k(k-1), E = 2k(k-1), F = 2 + k(k-1).
  for (int k = 2; k <= 40; ++k) EXPECT_EQ(schlafli_count(2, k), static_cast<std::uint64_t>(2 + k * (k - 1)));
  for (int d = 1; d <= 6; ++d) {
    for (int k = 0; k <= 20; ++k) EXPECT_EQ(schlafli_count(d, k), regions_recursive(d, k)) << d << " " << k;
  }
}

TEST(Verdict, Classify) {
  EXPECT_EQ(classify(Estimate::exact(1.0), Estimate::exact(0.5)), Verdict::Holds);
  EXPECT_EQ(classify(Estimate::exact(0.5), Estimate::exact(0.5)), Verdict::HoldsWithinError);
  EXPECT_EQ(classify(Estimate::exact(0.4), Estimate::exact(0.5)), Verdict::Violated);
  const Estimate noisy{0.49, 0.01, 100, 1};
  EXPECT_EQ(classify(noisy, Estimate::exact(0.5)), Verdict::HoldsWithinError);
  EXPECT_EQ(classify(noisy, Estimate::exact(0.44)), Verdict::Holds);
  EXPECT_EQ(classify(noisy, Estimate::exact(0.53)), Verdict::Violated);
  for (auto k : {StabilityKind::VolumeDelta2, StabilityKind::InradiusThetaR, StabilityKind::VoronoiThetaO}) {
    EXPECT_EQ(parse_stability_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(Verdict::InconclusiveUpperBoundDeviation), "inconclusive-upper-bound-deviation");
}

TEST(VerifyUrysohn, CapEqualityAndWedgeGap) {
  const HPolytope cap = cap_polytope(Cap(UnitVec{0.1, 0.4, 0.8}, 0.6), 256);
  const StabilityReport r = verify_urysohn(cap, 100000, 3, "cap");
  EXPECT_EQ(r.verdict, Verdict::HoldsWithinError);
  EXPECT_EQ(r.kind, "Urysohn");
  // A thin wedge of a lune: small area, perimeter close to a half great circle.
  const HPolytope wedge(2, {UnitVec::basis(2, 1), UnitVec{0.0, -std::cos(0.1), std::sin(0.1)}, UnitVec{1.0, 0.0, 0.2}});
  const StabilityReport w = verify_urysohn(wedge, 100000, 4, "wedge");
  EXPECT_EQ(w.verdict, Verdict::Holds);
  EXPECT_GE(w.lhs.value - w.rhs.value, 5.0 * combined_std_error(w.lhs, w.rhs));
  const StabilityReport exact = verify_urysohn(wedge, 0, 0, "wedge");
  EXPECT_TRUE(exact.lhs.is_exact());
  EXPECT_EQ(exact.verdict, Verdict::Holds);
  EXPECT_THROW(verify_urysohn(HPolytope(2, {UnitVec::origin(2)}), 10, 1), GeometryError);
}

TEST(VerifyUrysohn, RandomCellsNoViolations) {
  Rng rng(5);
  int checked = 0;
  for (int i = 0; i < 300 && checked < 100; ++i) {
    std::vector<UnitVec> pts;
    const int k = 3 + static_cast<int>(rng() % 30);
    for (int j = 0; j < k; ++j) pts.push_back(sample_uniform(rng, 2));
    const HPolytope P = crofton_cell(pts, UnitVec::origin(2));
    if (!enumerate_vertices(P).line_free) continue;
    ++checked;
    EXPECT_NE(verify_urysohn(P, 0, 0).verdict, Verdict::Violated);
  }
  EXPECT_EQ(checked, 100);
}

TEST(VerifyStability, CapsReportEquality) {
  const UnitVec o = UnitVec::origin(2);
  const double a = 0.5;
  const HPolytope cap = cap_polytope(Cap(o, a), 512);
  StabilityParams p;
  for (auto kind : {StabilityKind::VolumeDelta2, StabilityKind::InradiusThetaR, StabilityKind::VoronoiThetaO}) {
    const StabilityReport r = verify_stability(kind, cap, p, 100000, 7);
    EXPECT_EQ(r.verdict, Verdict::HoldsWithinError) << to_string(kind) << " " << r.lhs.value << " " << r.rhs.value;
  }
}

TEST(VerifyStability, OctantInradiusHolds) {
  StabilityParams p;
  p.a = 0.5;
  p.epsilon = 0.1;
  const StabilityReport r = verify_stability(StabilityKind::InradiusThetaR, octant(), p, 100000, 8);
  EXPECT_EQ(r.verdict, Verdict::Holds);
  EXPECT_GE(r.lhs.value - r.rhs.value, 3.0 * combined_std_error(r.lhs, r.rhs));
  EXPECT_NEAR(r.deviation, 0.33984, 1e-5);
  const StabilityReport exact = verify_stability(StabilityKind::InradiusThetaR, octant(), p, 0, 0);
  EXPECT_NEAR(exact.lhs.value, 3.0 / 8.0, 1e-12);
  EXPECT_EQ(exact.verdict, Verdict::Holds);
}

TEST(VerifyStability, Preconditions) {
  StabilityParams p;
  p.a = 0.7;  // above the octant inradius 0.6155
  p.epsilon = 0.1;
  try {
    verify_stability(StabilityKind::InradiusThetaR, octant(), p, 100, 1);
    FAIL() << "expected PreconditionFailed";
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
  }
  p.a = 0.5;
  p.epsilon = 0.5;  // above theta_r
  EXPECT_THROW(verify_stability(StabilityKind::InradiusThetaR, octant(), p, 100, 1), GeometryError);
  StabilityParams q;
  q.origin = UnitVec{1.0, 1.0, 1.0};
  q.a = 0.3;
  q.epsilon = 0.1;
  const StabilityReport r = verify_stability(StabilityKind::VoronoiThetaO, octant(), q, 50000, 2);
  EXPECT_NE(r.verdict, Verdict::Violated);
  q.origin = UnitVec{-1.0, 1.0, 1.0};
  EXPECT_THROW(verify_stability(StabilityKind::VoronoiThetaO, octant(), q, 100, 1), GeometryError);
}

TEST(StabilityReport, Serialization) {
  StabilityReport r;
  r.body_id = "b1";
  r.kind = "Urysohn";
  r.lhs = {0.25, 0.001, 1000, 9};
  r.rhs = Estimate::exact(0.2);
  r.verdict = Verdict::Holds;
  EXPECT_EQ(StabilityReport::csv_header(), "body_id,kind,lhs,lhs_se,rhs,rhs_se,verdict");
  EXPECT_EQ(r.csv_row(), "b1,Urysohn,0.25,0.001,0.20000000000000001,0,holds");
  const auto j = r.to_json();
  EXPECT_EQ(j["verdict"], "holds");
  EXPECT_EQ(j["lhs"]["n"], 1000);
}

TEST(StabilityFloor, Record) {
  const double a = cap_volume(2, 0.4);
  const StabilityFloor f0 = stability_floor(TauModel::VolumeU1, 2, a, 0.1, 0.0);
  EXPECT_NEAR(f0.floor, tau(TauModel::VolumeU1, 2, a), 1e-15);
  const StabilityFloor f1 = stability_floor(TauModel::VolumeU1, 2, a, 0.1, 1.0);
  EXPECT_NEAR(f1.floor, 2.0 * f0.tau, 1e-15);
  double prev = 0.0;
  for (double f = 0.0; f <= 1.0; f += 0.1) {
    const double v = stability_floor(TauModel::InradiusU1, 2, 0.3, 0.2, f).floor;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(stability_floor(TauModel::VolumeU1, 2, a, 0.1, 1.5), GeometryError);
}
