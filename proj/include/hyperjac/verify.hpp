#pragma once

// Sampling checks of the solution-set statements for the genus 3 and 4
// theta systems: forward inclusion on random curve points, exclusion of
// random Jacobian points, isolation of the predicted points, and agreement
// of the integer-characteristic form of the Weierstrass systems.

#include "hyperjac/locus.hpp"

#include <random>
#include <string>
#include <vector>

namespace hyperjac {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  bool below = true;  // pass means measured < threshold (else measured > threshold)
};

inline Check check_below(std::string name, double measured, double threshold) {
  return {std::move(name), measured < threshold, measured, threshold, true};
}

inline Check check_above(std::string name, double measured, double threshold) {
  return {std::move(name), measured > threshold, measured, threshold, false};
}

struct VerifyOptions {
  std::uint64_t seed = 1;
  int inclusion_samples = 50;
  int exclusion_samples = 200;
  int perturbations = 10;
  double perturbation_size = 1e-2;
  double inclusion_tol = 1e-6;
  double exclusion_tol = 1e-3;
  double isolation_tol = 1e-6;
  double remark_tol = 1e-9;
  double generic_separation = 0.25;  // x-distance of "generic" points from the auxiliary ones
};

namespace detail {

/// Random curve points whose x-coordinates are pairwise at least `sep` apart.
template <class Rng>
std::vector<CurvePoint> separated_points(const Curve& c, Rng& rng, int n, double sep) {
  std::vector<CurvePoint> out;
  while (static_cast<int>(out.size()) < n) {
    const CurvePoint p = random_curve_point(c, rng);
    bool ok = true;
    for (const auto& q : out) ok &= std::abs(p.x - q.x) >= sep;
    if (ok) out.push_back(p);
  }
  return out;
}

template <class Rng>
CurvePoint generic_point(const Curve& c, Rng& rng, const std::vector<CurvePoint>& avoid, double sep) {
  while (true) {
    const CurvePoint p = random_curve_point(c, rng);
    bool ok = true;
    for (const auto& q : avoid) ok &= std::abs(p.x - q.x) >= sep;
    if (ok) return p;
  }
}

template <class Rng>
CVector random_direction(int g, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector d(g);
  for (int i = 0; i < g; ++i) d(i) = cd(n(rng), n(rng));
  return d / d.norm();
}

inline CVector u_of(const Model& m, const CurvePoint& p) { return aj_path_integral(m.curve, m.periods, p); }

/// Largest difference between the residuals of the Weierstrass system
/// built from the table and the same system with shifts obtained by
/// integrating du up to the Weierstrass points.
template <class Rng>
double remark_discrepancy(ModelPtr model, SystemKind kind, const std::vector<int>& idx, Rng& rng, int samples) {
  const Model& m = *model;
  const ThetaSystem by_chars = weierstrass_system(model, kind, idx);
  std::vector<CurvePoint> pts;
  for (int s : idx) pts.push_back({m.curve.branch(s - 1), 0.0});
  ThetaSystem generic;
  switch (kind) {
    case SystemKind::g3_triple: generic = system_g3_triple(model, pts[0], pts[1], pts[2]); break;
    case SystemKind::g4_quad: generic = system_g4_quad(model, pts[0], pts[1], pts[2], pts[3], pts[4], pts[5]); break;
    default: fail(ErrorCode::InputError, "remark check is defined for the triple and quadruple systems");
  }
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const CVector u = random_jacobian_point(m.period_matrix(), rng);
    worst = std::max(worst, (residuals(generic, u) - residuals_via_chars(by_chars, u)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace detail

/// Pair and triple systems on a genus 3 curve.
inline std::vector<Check> verify_genus3(ModelPtr model, const VerifyOptions& opt = {}) {
  const Model& m = *model;
  if (m.genus() != 3) fail(ErrorCode::GenusMismatch, "genus 3 verification on a curve of genus " + std::to_string(m.genus()));
  std::mt19937_64 rng(opt.seed);
  const auto aux = detail::separated_points(m.curve, rng, 3, opt.generic_separation);
  const CurvePoint &p = aux[0], &q = aux[1], &r = aux[2];
  const ThetaSystem pair = system_g3_pair(model, p, q);
  const ThetaSystem triple = system_g3_triple(model, p, q, r);
  const CVector uPQ = pair.components[1].offset;
  const CVector uPQR = triple.components[1].offset;
  std::vector<Check> out;

  double on_curve = 0.0, on_shift = 0.0, triple_curve = 0.0;
  for (int i = 0; i < opt.inclusion_samples; ++i) {
    const CVector us = detail::u_of(m, random_curve_point(m.curve, rng));
    on_curve = std::max(on_curve, max_residual(pair, us));
    on_shift = std::max(on_shift, max_residual(pair, us + uPQ));
    triple_curve = std::max(triple_curve, max_residual(triple, us));
  }
  out.push_back(check_below("theorem2.inclusion.curve", on_curve, opt.inclusion_tol));
  out.push_back(check_below("theorem2.inclusion.shifted", on_shift, opt.inclusion_tol));

  double excl = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.exclusion_samples; ++i)
    excl = std::min(excl, max_residual(pair, random_jacobian_point(m.period_matrix(), rng)));
  out.push_back(check_above("theorem2.exclusion", excl, opt.exclusion_tol));

  out.push_back(check_below("theorem3.inclusion.curve", triple_curve, opt.inclusion_tol));
  out.push_back(check_below("theorem3.isolated_point", max_residual(triple, uPQR), opt.inclusion_tol));
  double back = 0.0;
  for (int i = 0; i < opt.perturbations; ++i) {
    const CVector start = uPQR + opt.perturbation_size * detail::random_direction(3, rng);
    back = std::max(back, lattice_distance(correct(triple, start).u, uPQR, m.period_matrix()));
  }
  out.push_back(check_below("theorem3.isolation", back, opt.isolation_tol));

  double third = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.inclusion_samples; ++i) {
    const CurvePoint s = detail::generic_point(m.curve, rng, aux, opt.generic_separation);
    third = std::min(third, residuals(triple, detail::u_of(m, s) + uPQ)(2));
  }
  out.push_back(check_above("theorem3.parasitic_excluded", third, opt.exclusion_tol));

  out.push_back(check_below("remark.integer_characteristics",
                            detail::remark_discrepancy(model, SystemKind::g3_triple, {1, 3, 5}, rng, 20), opt.remark_tol));
  return out;
}

/// Three- and four-equation systems on a genus 4 curve.
inline std::vector<Check> verify_genus4(ModelPtr model, const VerifyOptions& opt = {}) {
  const Model& m = *model;
  if (m.genus() != 4) fail(ErrorCode::GenusMismatch, "genus 4 verification on a curve of genus " + std::to_string(m.genus()));
  std::mt19937_64 rng(opt.seed);
  const auto aux = detail::separated_points(m.curve, rng, 6, opt.generic_separation);
  const ThetaSystem pairs = system_g4_pairs(model, aux[0], aux[1], aux[2], aux[3]);
  const ThetaSystem quad = system_g4_quad(model, aux[0], aux[1], aux[2], aux[3], aux[4], aux[5]);
  std::vector<Check> out;

  double curve3 = 0.0, curve4 = 0.0, shifted = 0.0;
  for (int i = 0; i < opt.inclusion_samples; ++i) {
    const CVector us = detail::u_of(m, random_curve_point(m.curve, rng));
    curve3 = std::max(curve3, max_residual(pairs, us));
    curve4 = std::max(curve4, max_residual(quad, us));
    for (const auto& c : pairs.components)
      if (c.kind == Component::Kind::shifted_image) shifted = std::max(shifted, max_residual(pairs, us + c.offset));
  }
  out.push_back(check_below("theorem4.inclusion.curve", curve3, opt.inclusion_tol));
  out.push_back(check_below("theorem4.inclusion.shifted", shifted, opt.inclusion_tol));

  double excl = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.exclusion_samples; ++i)
    excl = std::min(excl, max_residual(pairs, random_jacobian_point(m.period_matrix(), rng)));
  out.push_back(check_above("theorem4.exclusion", excl, opt.exclusion_tol));

  out.push_back(check_below("theorem5.inclusion.curve", curve4, opt.inclusion_tol));
  double points = 0.0;
  for (const auto& c : quad.components)
    if (c.kind == Component::Kind::isolated_point) points = std::max(points, max_residual(quad, c.offset));
  out.push_back(check_below("theorem5.isolated_points", points, opt.inclusion_tol));

  double back = 0.0;
  for (int i = 0; i < opt.perturbations; ++i) {
    const CVector target = quad.components[1 + i % 8].offset;
    const CVector start = target + opt.perturbation_size * detail::random_direction(4, rng);
    back = std::max(back, lattice_distance(correct(quad, start).u, target, m.period_matrix()));
  }
  out.push_back(check_below("theorem5.isolation", back, opt.isolation_tol));

  double fourth = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.inclusion_samples; ++i) {
    const CurvePoint s = detail::generic_point(m.curve, rng, aux, opt.generic_separation);
    fourth = std::min(fourth, residuals(quad, detail::u_of(m, s) + pairs.components[1].offset)(3));
  }
  out.push_back(check_above("theorem5.parasitic_excluded", fourth, opt.exclusion_tol));

  auto rejects = [&](auto&& build) {
    try {
      build();
    } catch (const Error& e) {
      return e.code() == ErrorCode::JEquivalentPair;
    }
    return false;
  };
  const bool r4 = rejects([&] { system_g4_pairs(model, aux[0], aux[1], aux[2], involution(aux[2])); });
  const bool r5 = rejects([&] { system_g4_quad(model, aux[0], aux[1], aux[2], aux[3], aux[4], involution(aux[4])); });
  out.push_back({"theorem4.j_equivalent_rejected", r4, r4 ? 1.0 : 0.0, 0.5, false});
  out.push_back({"theorem5.j_equivalent_rejected", r5, r5 ? 1.0 : 0.0, 0.5, false});

  out.push_back(check_below("remark.integer_characteristics",
                            detail::remark_discrepancy(model, SystemKind::g4_quad, {1, 2, 3, 4, 5, 6}, rng, 20), opt.remark_tol));
  return out;
}

inline std::vector<Check> verify_theorems(ModelPtr model, const VerifyOptions& opt = {}) {
  if (model->genus() == 3) return verify_genus3(std::move(model), opt);
  if (model->genus() == 4) return verify_genus4(std::move(model), opt);
  fail(ErrorCode::GenusMismatch, "theorem checks exist for genus 3 and 4");
}

}  // namespace hyperjac
