#include "support.hpp"

#include <gtest/gtest.h>

using namespace hyperjac;
using testing_support::cached_model;
using testing_support::point_off_cuts;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InputError;
}

/// Random polyline from a point off the cuts, wandering among the branch points.
PathSpec random_path(const Curve& c, std::mt19937_64& rng, const std::vector<cd>& avoid) {
  while (true) {
    PathSpec p;
    p.start_point = point_off_cuts(c, rng);
    for (int k = 0; k < 3; ++k) p.waypoints.push_back(point_off_cuts(c, rng).x);
    const auto v = p.vertices();
    bool ok = true;
    for (std::size_t s = 0; s + 1 < v.size(); ++s) {
      for (cd x : avoid) ok &= detail::point_segment_distance(x, v[s], v[s + 1]) > 0.2;
      for (cd b : c.branch_points()) ok &= detail::point_segment_distance(b, v[s], v[s + 1]) > 0.1;
    }
    if (ok) return p;
  }
}

}  // namespace

TEST(ThirdKind, PicksAnOddCharacteristic) {
  const ModelPtr m = cached_model(3, 1);
  const ThetaChar c = pick_odd_char(m->theta, m->scale);
  EXPECT_EQ(char_parity(c), Parity::odd);
  EXPECT_LT(std::abs(m->theta.with_char(c, CVector::Zero(3))), 1e-9 * m->scale);
}

TEST(ThirdKind, FullShiftConventionHasNoUsableCharacteristic) {
  const ModelPtr m = cached_model(3, 1);
  EXPECT_EQ(code_of([&] { pick_odd_char(m->theta, m->scale, CharConvention::full); }), ErrorCode::NoUsableOddCharacteristic);
}

TEST(ThirdKind, AgreesWithQuadrature) {
  for (int g : {1, 2, 3, 4}) {
    const ModelPtr m = cached_model(g, 2);
    std::mt19937_64 rng(10 + g);
    for (int i = 0; i < 3; ++i) {
      const CurvePoint r = point_off_cuts(m->curve, rng), q = point_off_cuts(m->curve, rng);
      const PathSpec path = random_path(m->curve, rng, {r.x, q.x});
      const ThirdKindSpec spec = make_third_kind(*m, r, q);
      const EtaResult e = eta_along(*m, spec, path);
      const cd o = oracle_third_kind(*m, r, q, path);
      EXPECT_LT(std::abs(e.increment - o), 1e-8) << "g=" << g;
    }
  }
}

TEST(ThirdKind, SwappingPolesNegates) {
  const ModelPtr m = cached_model(3, 3);
  std::mt19937_64 rng(4);
  const CurvePoint r = point_off_cuts(m->curve, rng), q = point_off_cuts(m->curve, rng);
  const PathSpec path = random_path(m->curve, rng, {r.x, q.x});
  const ThirdKindSpec spec = make_third_kind(*m, r, q);
  const cd a = eta_along(*m, spec, path).increment;
  const cd b = eta_along(*m, swapped(spec), path).increment;
  EXPECT_LT(std::abs(a + b), 1e-10);
}

TEST(ThirdKind, ResidueCircles) {
  const ModelPtr m = cached_model(3, 4);
  std::mt19937_64 rng(5);
  const CurvePoint r = point_off_cuts(m->curve, rng, 0.4);
  CurvePoint q = point_off_cuts(m->curve, rng, 0.4);
  while (std::abs(r.x - q.x) < 0.3) q = point_off_cuts(m->curve, rng, 0.4);
  const ThirdKindSpec spec = make_third_kind(*m, r, q);
  const cd around_r = eta_along(*m, spec, circle_path(m->curve, r, 0.1)).increment;
  const cd around_q = eta_along(*m, spec, circle_path(m->curve, q, 0.1)).increment;
  EXPECT_LT(std::abs(around_r - 2.0 * pi * I), 1e-9);
  EXPECT_LT(std::abs(around_q + 2.0 * pi * I), 1e-9);
  // the other sheet over x_R carries no pole
  const cd other = eta_along(*m, spec, circle_path(m->curve, involution(r), 0.1)).increment;
  EXPECT_LT(std::abs(other), 1e-9);
}

TEST(ThirdKind, LogarithmicNearThePole) {
  const ModelPtr m = cached_model(3, 5);
  std::mt19937_64 rng(6);
  const CurvePoint r = point_off_cuts(m->curve, rng, 0.3), q = point_off_cuts(m->curve, rng, 0.3);
  const ThirdKindSpec spec = make_third_kind(*m, r, q);
  const int sheet = std::abs(r.w - m->curve.w1(r.x)) < std::abs(r.w) ? 1 : -1;
  PathSpec path;
  path.start_point = m->curve.point(r.x + 1e-3, sheet);
  path.waypoints = {r.x + 1e-6};
  const cd e = eta_along(*m, spec, path).increment;
  // eta ~ log(x - x_R) + O(x - x_R)
  EXPECT_LT(std::abs(e - std::log(1e-3)), 5e-3);
}

TEST(ThirdKind, TraceSamplesAgreeWithThePath) {
  const ModelPtr m = cached_model(3, 6);
  std::mt19937_64 rng(7);
  const CurvePoint r = point_off_cuts(m->curve, rng), q = point_off_cuts(m->curve, rng);
  const PathSpec path = random_path(m->curve, rng, {r.x, q.x});
  const ThirdKindSpec spec = make_third_kind(*m, r, q);
  // sample u along the same polyline by integrating to each sub-point
  std::vector<CVector> us;
  const auto v = path.vertices();
  CurvePoint cur = path.start_point;
  CVector u = aj_path_integral(m->curve, m->periods, cur);
  us.push_back(u);
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    for (int k = 1; k <= 40; ++k) {
      PathSpec piece;
      piece.start_point = cur;
      piece.waypoints = {v[s] + (v[s + 1] - v[s]) * (k / 40.0)};
      u += aj_along(m->curve, m->periods, piece);
      cur = continue_w(m->curve, piece);
      us.push_back(u);
    }
  }
  const cd a = eta_along_samples(*m, spec, us).increment;
  const cd b = eta_along(*m, spec, path).increment;
  EXPECT_LT(std::abs(a - b), 1e-9);
}

TEST(ThirdKind, Errors) {
  const ModelPtr m = cached_model(3, 7);
  std::mt19937_64 rng(8);
  const CurvePoint r = point_off_cuts(m->curve, rng), q = point_off_cuts(m->curve, rng);
  EXPECT_EQ(code_of([&] { make_third_kind(*m, r, r); }), ErrorCode::CoincidentPoints);
  const ThirdKindSpec spec = make_third_kind(*m, r, q);
  PathSpec through;
  through.start_point = m->curve.point(r.x - 0.05, 1);
  through.waypoints = {r.x + 0.05};
  EXPECT_EQ(code_of([&] { eta_along(*m, spec, through); }), ErrorCode::PathThroughPole);
  ThetaChar even = ThetaChar::zero(3);
  EXPECT_EQ(code_of([&] { make_third_kind(*m, r, q, even); }), ErrorCode::InputError);
}
