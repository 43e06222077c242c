#include "support.hpp"

#include <gtest/gtest.h>

using namespace hyperjac;
using testing_support::random_curve;

TEST(Periods, GenusOneMatchesTheAgmRatio) {
  const Curve c({-2.0, -1.0, 1.0, 2.0});
  const PeriodData pd = compute_periods(c);
  const cd tau = testing_support::real_quartic_tau(-2.0, -1.0, 1.0, 2.0);
  EXPECT_LT(std::abs(pd.period_matrix(0, 0) - tau), 1e-9);
  EXPECT_LT(std::abs(pd.period_matrix(0, 0).real()), 1e-12);
}

TEST(Periods, GenusOneOtherRealQuartics) {
  for (auto e : std::vector<std::array<double, 4>>{{-3.0, -0.5, 0.25, 4.0}, {0.0, 1.0, 5.0, 5.5}, {-1.0, 0.0, 0.1, 2.0}}) {
    const PeriodData pd = compute_periods(Curve({e[0], e[1], e[2], e[3]}));
    EXPECT_LT(std::abs(pd.period_matrix(0, 0) - testing_support::real_quartic_tau(e[0], e[1], e[2], e[3])), 1e-9);
  }
}

TEST(Periods, RiemannRelationsOnRandomCurves) {
  for (int g = 1; g <= 4; ++g) {
    for (std::uint64_t seed : {1u, 2u}) {
      const PeriodData pd = compute_periods(random_curve(g, seed));
      EXPECT_LT(symmetry_defect(pd.period_matrix), 1e-8) << "g=" << g;
      EXPECT_GT(min_imag_eigenvalue(pd.period_matrix), 0.0) << "g=" << g;
      EXPECT_LT(pd.cond_a, 1e8);
    }
  }
}

TEST(Periods, RealBranchPointsGenusTwo) {
  const PeriodData pd = compute_periods(Curve({-3.0, -2.0, -0.5, 0.5, 2.0, 3.5}));
  EXPECT_GT(min_imag_eigenvalue(pd.period_matrix), 0.0);
  EXPECT_LT(symmetry_defect(pd.period_matrix), 1e-10);
}

TEST(Periods, NormalizationGivesIdentityAPeriods) {
  const Curve c = random_curve(3, 4);
  const PeriodData pd = compute_periods(c);
  const CMatrix a_norm = pd.raw_a * pd.normalizer.transpose();
  EXPECT_LT((a_norm - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Periods, StableUnderTighterQuadrature) {
  const Curve c = random_curve(3, 6);
  const CMatrix p1 = compute_periods(c, 1e-10).period_matrix;
  const CMatrix p2 = compute_periods(c, 1e-14).period_matrix;
  EXPECT_LT((p1 - p2).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Periods, CyclesIntersectCanonically) {
  const Curve c = random_curve(4, 1);
  for (int j = 1; j <= 4; ++j) {
    for (int k = 1; k <= 4; ++k) {
      EXPECT_EQ(intersection_mod2(cycle(c, CycleKind::a, j), cycle(c, CycleKind::b, k)), j == k ? 1 : 0);
      EXPECT_EQ(intersection_mod2(cycle(c, CycleKind::a, j), cycle(c, CycleKind::a, k)), 0);
    }
  }
}

TEST(Periods, PeriodIsAnIntegralOfTheDifferential) {
  // a-period of dx/w from the cycle machinery against a plain circle quadrature
  const Curve c = random_curve(2, 9);
  const PeriodData pd = compute_periods(c);
  const cd centre = 0.5 * (c.branch(0) + c.branch(1));
  const double r = 0.5 * std::abs(c.branch(1) - c.branch(0)) + 0.2;
  PathSpec p;
  p.start_point = c.point(centre - r, 1);
  const int n = 64;
  for (int k = 1; k <= n; ++k) p.waypoints.push_back(centre - std::polar(r, -2.0 * pi * k / n));
  p.waypoints.back() = centre - r;
  const LiftedPath lp = lift_path(c, p);
  const CVector raw = lp.integrate(detail::monomials(2), 2, 1e-13);
  // the circle is homologous to +-a_1
  const double err = std::min((raw - pd.raw_a.row(0).transpose()).norm(), (raw + pd.raw_a.row(0).transpose()).norm());
  EXPECT_LT(err, 1e-10);
}

TEST(Periods, RejectsNonSimpleOrder) {
  const Curve c({{0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}, {1.0, -1.0}});
  try {
    compute_periods(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSimpleBranchPolyline);
  }
}

TEST(Periods, CycleIndexChecked) {
  const Curve c = random_curve(2, 1);
  EXPECT_THROW(cycle(c, CycleKind::a, 3), Error);
  EXPECT_THROW(cycle(c, CycleKind::b, 0), Error);
}
