#include <gtest/gtest.h>

#include <cmath>

#include "sphertess/constants.hpp"
#include "sphertess/estimators.hpp"
#include "sphertess/parallel.hpp"

using namespace sphertess;

namespace {

SimulationOptions fast_options() {
  SimulationOptions o;
  o.volume_samples = 2000;
  o.u1_samples = 2000;
  o.deviation.grid = 128;
  o.deviation.descent_iterations = 60;
  return o;
}

}  // namespace

TEST(Wilson, EndpointsSolveScoreEquation) {
  for (auto [s, n] : {std::pair<int, int>{5, 10}, {0, 10}, {10, 10}, {37, 1000}, {999, 1000}}) {
    const Proportion p = wilson(s, n);
    const double ph = static_cast<double>(s) / n;
    EXPECT_LE(p.lo, ph);
    EXPECT_GE(p.hi, ph);
    auto score = [&](double q) { return (ph - q) * (ph - q) - kZ95 * kZ95 * q * (1.0 - q) / n; };
    if (p.lo > 0.0) {
      EXPECT_NEAR(score(p.lo), 0.0, 1e-12);
    }
    if (p.hi < 1.0) {
      EXPECT_NEAR(score(p.hi), 0.0, 1e-12);
    }
  }
  const Proportion half = wilson(5, 10);
  EXPECT_NEAR(half.lo, 0.2366, 1e-4);
  EXPECT_NEAR(half.hi, 0.7634, 1e-4);
  EXPECT_NEAR(half.std_error, std::sqrt(0.025), 1e-15);
  const Proportion none = wilson(0, 0);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_EQ(none.hi, 1.0);
}

TEST(MeanOf, SampleStatistics) {
  const MeanEstimate m = mean_of({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(m.n, 4u);
}

TEST(Enums, RoundTrip) {
  for (auto m : {CellModel::HyperplaneCrofton, CellModel::HyperplaneTypical, CellModel::VoronoiTypical}) {
    EXPECT_EQ(parse_cell_model(to_string(m)), m);
  }
  for (auto k : {DeviationKind::Delta2, DeviationKind::ThetaR, DeviationKind::ThetaO, DeviationKind::Canonical}) {
    EXPECT_EQ(parse_deviation_kind(to_string(k)), k);
  }
  for (auto f : {TypicalFunctional::One, TypicalFunctional::Volume, TypicalFunctional::U1,
                 TypicalFunctional::VolumeIndicator}) {
    EXPECT_EQ(parse_typical_functional(to_string(f)), f);
  }
  EXPECT_FALSE(parse_cell_model("Poisson").has_value());
}

TEST(Conditional, ZeroEpsilonGivesOne) {
  SizeSpec size{SizeKind::Volume, std::nullopt};
  const ConditionalResult r = estimate_conditional_deviation(CellModel::HyperplaneCrofton, size, DeviationKind::ThetaR,
                                                             0.5, 0.0, 1.0, 400, 3, fast_options());
  EXPECT_GT(r.conditioning, 0u);
  EXPECT_EQ(r.joint + r.undefined, r.conditioning);
  EXPECT_DOUBLE_EQ(r.conditional.p, 1.0);
  EXPECT_LE(r.joint, r.conditioning);
  EXPECT_LE(r.conditioning, r.units);
}

TEST(Conditional, VoronoiLargeEpsilonGivesZero) {
  SizeSpec size{SizeKind::CentredInradius, UnitVec::origin(2)};
  const ConditionalResult r = estimate_conditional_deviation(CellModel::VoronoiTypical, size, DeviationKind::ThetaO, 0.3,
                                                             kHalfPi, 20.0 / (4.0 * kPi), 2000, 4, fast_options());
  EXPECT_GT(r.conditioning, 0u);
  EXPECT_EQ(r.joint, 0u);
  EXPECT_EQ(r.conditional.p, 0.0);
}

TEST(Conditional, StarvedWhenConditionUnreachable) {
  SizeSpec size{SizeKind::Inradius, std::nullopt};
  const ConditionalResult r = estimate_conditional_deviation(CellModel::HyperplaneCrofton, size, DeviationKind::ThetaR,
                                                             1.5, 0.1, 10.0, 200, 5, fast_options());
  EXPECT_EQ(r.conditioning, 0u);
  EXPECT_TRUE(r.starved);
  EXPECT_EQ(r.conditional.lo, 0.0);
  EXPECT_EQ(r.conditional.hi, 1.0);
}

TEST(Conditional, DecaysInIntensity) {
  SizeSpec size{SizeKind::Volume, std::nullopt};
  const auto opts = fast_options();
  const double a = cap_volume(2, 0.2);
  const ConditionalResult lo =
      estimate_conditional_deviation(CellModel::HyperplaneCrofton, size, DeviationKind::ThetaR, a, 0.1, 0.5, 3000, 6, opts);
  const ConditionalResult hi =
      estimate_conditional_deviation(CellModel::HyperplaneCrofton, size, DeviationKind::ThetaR, a, 0.1, 2.0, 3000, 7, opts);
  const double slack = 3.0 * ((lo.conditional.hi - lo.conditional.lo) + (hi.conditional.hi - hi.conditional.lo));
  EXPECT_LE(hi.conditional.p, lo.conditional.p + slack);
}

TEST(Conditional, TypicalAndCanonicalModelsRun) {
  SizeSpec size{SizeKind::Volume, std::nullopt};
  const auto opts = fast_options();
  const ConditionalResult t = estimate_conditional_deviation(CellModel::HyperplaneTypical, size, DeviationKind::Canonical,
                                                             0.3, 0.2, 0.5, 100, 8, opts);
  EXPECT_GT(t.units, 100u);
  EXPECT_LE(t.joint, t.conditioning);
  const ConditionalResult d = estimate_conditional_deviation(CellModel::HyperplaneCrofton, size, DeviationKind::Delta2, 0.3,
                                                             0.05, 0.5, 100, 9, opts);
  EXPECT_LE(d.joint + d.undefined, d.conditioning);
}

TEST(LowerBound, Examples) {
  SizeSpec centred{SizeKind::CentredInradius, UnitVec::origin(2)};
  const LowerBoundReport r = check_zero_cell_lower_bound(centred, 0.3, 0.5, 4000, 10, fast_options());
  EXPECT_NEAR(r.rhs, std::exp(-0.5 * 4.0 * kPi * std::sin(0.3)), 1e-12);
  EXPECT_NEAR(r.rhs, 0.1561, 1e-4);
  EXPECT_TRUE(r.pass);
  SizeSpec vol{SizeKind::Volume, std::nullopt};
  const LowerBoundReport h = check_zero_cell_lower_bound(vol, 2.0 * kPi, 0.1, 2000, 11, fast_options());
  EXPECT_NEAR(h.rhs, std::exp(-4.0 * kPi * 0.1), 1e-10);
  EXPECT_NEAR(h.tau, 1.0, 1e-10);
  EXPECT_TRUE(h.pass);
  const LowerBoundReport tiny = check_zero_cell_lower_bound(vol, 1.0, 1e-6, 500, 12, fast_options());
  EXPECT_GT(tiny.rhs, 0.9999);
  EXPECT_GT(tiny.p.p, 0.99);
}

TEST(Rate, CurveShapeAndSqrtLaw) {
  SizeSpec vol{SizeKind::Volume, std::nullopt};
  const double a = cap_volume(2, 0.2);
  const RateCurve c = estimate_rate(vol, a, {0.5, 1.0}, 4000, 13, fast_options());
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_NEAR(c.target, -4.0 * kPi * std::sin(0.2), 1e-12);
  EXPECT_NEAR(c.target, -2.4966, 1e-4);
  for (const auto& p : c.points) {
    EXPECT_GE(p.p.p, 0.0);
    EXPECT_LE(p.p.p, 1.0);
    EXPECT_LE(p.p.lo, p.p.p);
    EXPECT_GE(p.p.hi, p.p.p);
    EXPECT_EQ(p.p.trials, 4000u);
    EXPECT_TRUE(p.lower_bound_holds);
  }
  const RateCurve big = estimate_rate(vol, a, {0.5}, 16000, 14, fast_options());
  const double w_small = c.points[0].p.hi - c.points[0].p.lo;
  const double w_big = big.points[0].p.hi - big.points[0].p.lo;
  EXPECT_NEAR(w_small / w_big, 2.0, 0.2);
  EXPECT_THROW(estimate_rate(vol, a, {1.0, 0.5}, 10, 1), GeometryError);
}

TEST(CellCount, SmallRunAndLimit) {
  const CellCountReport r = check_cell_count(4.0 / (4.0 * kPi), 1000, 15, fast_options());
  EXPECT_NEAR(r.target, 18.0 - std::exp(-4.0), 1e-12);
  EXPECT_EQ(r.certificate_failures, 0u);
  EXPECT_TRUE(r.pass);
  const CellCountReport z = check_cell_count(1e-6, 200, 16, fast_options());
  EXPECT_NEAR(z.target, 1.0, 1e-4);
  EXPECT_TRUE(z.pass);
}

TEST(TypicalIdentity, OneAndVolume) {
  const double gamma = 4.0 / (4.0 * kPi);
  const TypicalIdentityReport one = check_typical_identity(TypicalFunctional::One, 0.0, gamma, 300, 17, fast_options());
  EXPECT_DOUBLE_EQ(one.lhs.mean, 1.0);
  EXPECT_NEAR(one.rhs.mean, 1.0, 1e-9);
  EXPECT_TRUE(one.pass);
  const TypicalIdentityReport vol = check_typical_identity(TypicalFunctional::Volume, 0.0, gamma, 500, 18, fast_options());
  EXPECT_TRUE(vol.pass);
  const TypicalIdentityReport ind =
      check_typical_identity(TypicalFunctional::VolumeIndicator, 1.0, gamma, 500, 19, fast_options());
  EXPECT_TRUE(ind.pass);
}

TEST(VoronoiTail, TargetMonotoneAndSmallRun) {
  const VoronoiTailReport r = check_voronoi_tail(0.3, 20.0 / (4.0 * kPi), 2, 5000, 20);
  EXPECT_NEAR(r.target, std::exp(-20.0 / (4.0 * kPi) * cap_volume(2, 0.6)), 1e-12);
  EXPECT_NEAR(r.target, std::exp(-20.0 / (4.0 * kPi) * 2.0 * kPi * (1.0 - std::cos(0.6))), 1e-14);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.band.lo, r.p.lo);
  EXPECT_GE(r.band.hi, r.p.hi);
  double prev = 1.0;
  for (double g : {0.5, 1.0, 2.0, 4.0}) {
    const double t = check_voronoi_tail(0.3, g, 2, 1, 1).target;
    EXPECT_LT(t, prev);
    prev = t;
  }
  prev = 1.0;
  for (double a : {0.1, 0.3, 0.6, 1.0}) {
    const double t = check_voronoi_tail(a, 1.0, 2, 1, 1).target;
    EXPECT_LT(t, prev);
    prev = t;
  }
  EXPECT_GT(check_voronoi_tail(1e-6, 1.0, 2, 1, 1).target, 0.9999);
  EXPECT_THROW(check_voronoi_tail(1.6, 1.0, 2, 10, 1), GeometryError);
}

TEST(BisectorIdentity, NoMismatches) {
  const BisectorIdentityReport r = check_bisector_identity(2.0, 2, 1000, 21);
  EXPECT_EQ(r.realizations, 1000u);
  EXPECT_EQ(r.mismatches, 0u);
  EXPECT_LE(r.worst, 1e-10);
}

TEST(Determinism, IndependentOfThreadCount) {
  SizeSpec vol{SizeKind::Volume, std::nullopt};
  const auto opts = fast_options();
  set_thread_count(1);
  const LowerBoundReport a = check_zero_cell_lower_bound(vol, 0.5, 1.0, 3000, 22, opts);
  const ConditionalResult ca =
      estimate_conditional_deviation(CellModel::HyperplaneCrofton, vol, DeviationKind::ThetaR, 0.3, 0.1, 1.0, 300, 23, opts);
  set_thread_count(4);
  const LowerBoundReport b = check_zero_cell_lower_bound(vol, 0.5, 1.0, 3000, 22, opts);
  const ConditionalResult cb =
      estimate_conditional_deviation(CellModel::HyperplaneCrofton, vol, DeviationKind::ThetaR, 0.3, 0.1, 1.0, 300, 23, opts);
  set_thread_count(0);
  EXPECT_EQ(a.p.successes, b.p.successes);
  EXPECT_EQ(ca.joint, cb.joint);
  EXPECT_EQ(ca.conditioning, cb.conditioning);
}
