#include "support.hpp"

#include <gtest/gtest.h>

using namespace hyperjac;
using testing_support::cached_model;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InputError;
}

std::vector<CurvePoint> aux_points(const Curve& c, std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  return detail::separated_points(c, rng, n, 0.25);
}

VerifyOptions light() {
  VerifyOptions o;
  o.inclusion_samples = 10;
  o.exclusion_samples = 40;
  o.perturbations = 4;
  return o;
}

}  // namespace

TEST(Locus, GenusThreeStatementsHold) {
  for (const Check& c : verify_genus3(cached_model(3, 1), light())) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
}

TEST(Locus, GenusFourStatementsHold) {
  for (const Check& c : verify_genus4(cached_model(4, 1), light())) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
}

TEST(Locus, SystemsCarryTheirComponents) {
  const ModelPtr m = cached_model(4, 2);
  const auto p = aux_points(m->curve, 1, 6);
  const ThetaSystem pairs = system_g4_pairs(m, p[0], p[1], p[2], p[3]);
  const ThetaSystem quad = system_g4_quad(m, p[0], p[1], p[2], p[3], p[4], p[5]);
  EXPECT_EQ(pairs.size(), 3u);
  EXPECT_EQ(quad.size(), 4u);
  int shifted = 0, isolated = 0;
  for (const auto& c : pairs.components) shifted += c.kind == Component::Kind::shifted_image;
  for (const auto& c : quad.components) isolated += c.kind == Component::Kind::isolated_point;
  EXPECT_EQ(shifted, 4);
  EXPECT_EQ(isolated, 8);
}

TEST(Locus, IntegerCharacteristicFormAgrees) {
  const ModelPtr m = cached_model(3, 2);
  std::mt19937_64 rng(3);
  EXPECT_LT(detail::remark_discrepancy(m, SystemKind::g3_triple, {2, 4, 6}, rng, 10), 1e-9);
}

TEST(Locus, ResidualsAreLatticeInvariant) {
  const ModelPtr m = cached_model(3, 3);
  const auto p = aux_points(m->curve, 2, 2);
  const ThetaSystem sys = system_g3_pair(m, p[0], p[1]);
  std::mt19937_64 rng(4);
  const CVector u = random_jacobian_point(m->period_matrix(), rng);
  const CVector v = u + m->period_matrix().col(1) - 2.0 * CVector::Unit(3, 2);
  EXPECT_LT((residuals(sys, u) - residuals(sys, v)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Locus, CorrectorReturnsToTheCurveImage) {
  const ModelPtr m = cached_model(3, 4);
  const ThetaSystem sys = weierstrass_system(m, SystemKind::g3_triple, {2, 4, 6});
  std::mt19937_64 rng(5);
  const CVector on = aj_path_integral(m->curve, m->periods, random_curve_point(m->curve, rng));
  const CorrectorResult cr = correct(sys, on + 1e-3 * detail::random_direction(3, rng));
  EXPECT_TRUE(cr.converged);
  EXPECT_LT(cr.residual, 1e-12);
}

TEST(Locus, TangentProjectsToTheCurvePoint) {
  const ModelPtr m = cached_model(3, 5);
  const ThetaSystem sys = weierstrass_system(m, SystemKind::g3_triple, {1, 3, 5});
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    const CurvePoint p = random_curve_point(m->curve, rng);
    const TangentInfo t = tangent_at(sys, aj_path_integral(m->curve, m->periods, p));
    EXPECT_FALSE(t.degenerate);
    const Projection pr = project_to_x(m->periods, t.tangent);
    EXPECT_LT(std::abs(pr.x - p.x), 1e-8 * std::max(1.0, std::abs(p.x)));
  }
}

TEST(Locus, ProjectionRejectsForeignDirections) {
  const ModelPtr m = cached_model(3, 5);
  CVector t(3);
  t << 1.0, 0.0, 1.0;
  EXPECT_EQ(code_of([&] { project_to_x(m->periods, t); }), ErrorCode::ProjectionInconsistent);
  EXPECT_EQ(code_of([&] { project_to_x(cached_model(1, 1)->periods, CVector::Ones(1)); }), ErrorCode::InputError);
}

TEST(Locus, ShortTraceStaysOnTheCurve) {
  const ModelPtr m = cached_model(3, 6);
  const ThetaSystem sys = weierstrass_system(m, SystemKind::g3_triple, {2, 4, 6});
  const TraceResult tr = trace(sys, from_char(weierstrass_char(1, 3), m->period_matrix()), 0.0, 60);
  EXPECT_EQ(tr.samples.size(), 61u);
  EXPECT_LT(tr.max_residual(), 1e-6);
  EXPECT_LT(tr.max_ratio_spread(), 1e-6);
  EXPECT_LT(tr.max_curve_residual(), 1e-6);
  // the first sample sits at the Weierstrass point P1
  EXPECT_LT(std::abs(tr.samples.front().x_proj - m->curve.branch(0)), 1e-6);
}

TEST(Locus, TraceCorrectsAnApproximateSeed) {
  const ModelPtr m = cached_model(3, 6);
  const ThetaSystem sys = weierstrass_system(m, SystemKind::g3_triple, {2, 4, 6});
  CVector seed = from_char(weierstrass_char(1, 3), m->period_matrix());
  seed(0) += 0.01;
  const TraceResult tr = trace(sys, seed, 0.0, 5);
  EXPECT_LT(tr.max_residual(), 1e-6);
  seed(0) = cd(std::nan(""), 0.0);
  EXPECT_EQ(code_of([&] { trace(sys, seed, 0.0, 5); }), ErrorCode::CorrectorDiverged);
}

TEST(Locus, ClassifiesComponents) {
  const ModelPtr m = cached_model(3, 7);
  const auto p = aux_points(m->curve, 3, 3);
  const ThetaSystem pair = system_g3_pair(m, p[0], p[1]);
  const ThetaSystem triple = system_g3_triple(m, p[0], p[1], p[2]);
  std::mt19937_64 rng(8);
  const CVector us = aj_path_integral(m->curve, m->periods, random_curve_point(m->curve, rng));
  EXPECT_EQ(classify(pair, us).kind, LabelKind::OnCurveImage);
  const ComponentLabel shifted = classify(pair, us + pair.components[1].offset);
  EXPECT_EQ(shifted.kind, LabelKind::OnShiftedImage);
  EXPECT_EQ(shifted.id, "X+P+Q");
  EXPECT_EQ(classify(triple, triple.components[1].offset).kind, LabelKind::IsolatedPoint);
  EXPECT_EQ(classify(pair, random_jacobian_point(m->period_matrix(), rng)).kind, LabelKind::NotASolution);
}

TEST(Locus, PreconditionsAreEnforced) {
  const ModelPtr m3 = cached_model(3, 8);
  const ModelPtr m4 = cached_model(4, 3);
  const auto p = aux_points(m4->curve, 4, 6);
  const auto q = aux_points(m3->curve, 4, 3);
  EXPECT_EQ(code_of([&] { system_g3_pair(m4, p[0], p[1]); }), ErrorCode::GenusMismatch);
  EXPECT_EQ(code_of([&] { system_g4_pairs(m3, q[0], q[1], q[2], q[0]); }), ErrorCode::GenusMismatch);
  EXPECT_EQ(code_of([&] { system_g3_triple(m3, q[0], q[1], q[0]); }), ErrorCode::CoincidentPoints);
  EXPECT_EQ(code_of([&] { system_g4_pairs(m4, p[0], p[1], p[2], involution(p[2])); }), ErrorCode::JEquivalentPair);
  EXPECT_EQ(code_of([&] { system_g4_pairs(m4, p[0], involution(p[0]), p[2], p[3]); }), ErrorCode::JEquivalentPair);
  EXPECT_EQ(code_of([&] { system_g4_quad(m4, p[0], p[1], p[2], p[3], p[4], involution(p[4])); }),
            ErrorCode::JEquivalentPair);
  EXPECT_EQ(code_of([&] { weierstrass_system(m3, SystemKind::g3_triple, {1, 3, 9}); }), ErrorCode::IndexOutOfRange);
}

TEST(Locus, CurveSystemSeparatesTheCurveImage) {
  const ModelPtr m = cached_model(4, 4);
  const ThetaSystem cs = curve_system(m);
  std::mt19937_64 rng(9);
  const CVector on = aj_path_integral(m->curve, m->periods, random_curve_point(m->curve, rng));
  EXPECT_LT(max_residual(cs, on), 1e-10);
  EXPECT_LT(distance_to_curve_image(cs, on), 1e-10);
  const CVector off = random_jacobian_point(m->period_matrix(), rng);
  EXPECT_GT(max_residual(cs, off), 1e-3);
}
