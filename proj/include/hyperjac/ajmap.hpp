#pragma once

#include "hyperjac/jacobian.hpp"
#include "hyperjac/path.hpp"
#include "hyperjac/periods.hpp"

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

namespace hyperjac {

/// Integral of the normalized differentials du along a lifted path.
inline CVector integrate_du(const Curve& curve, const PeriodData& pd, const LiftedPath& path, double tol = 1e-12) {
  const int g = curve.genus();
  const CVector raw = path.integrate(detail::monomials(g), g, tol);
  return pd.normalizer * raw;
}

/// u(P) = integral of du from P_0 = (x_{2g+2}, 0) to P, along a route that
/// does not cross the a-cycle cuts. The value is a specific representative
/// in C^g (not reduced); representatives of different points obtained this
/// way differ by integrals along paths that avoid the a-cycles.
inline CVector aj_path_integral(const Curve& curve, const PeriodData& pd, const CurvePoint& p, double tol = 1e-12) {
  const BaseRouteResult route = route_from_base(curve, p);
  if (route.path.segments.empty()) return CVector::Zero(curve.genus());
  return integrate_du(curve, pd, route.path, tol);
}

/// Abel-Jacobi image of P reduced to the canonical representative.
inline CVector aj(const Curve& curve, const PeriodData& pd, const CurvePoint& p, double tol = 1e-12) {
  return reduce(aj_path_integral(curve, pd, p, tol), pd.period_matrix);
}

/// u(end) - u(start) along an explicit waypoint path.
inline CVector aj_along(const Curve& curve, const PeriodData& pd, const PathSpec& path, double tol = 1e-12) {
  if (path.vertices().size() < 2) return CVector::Zero(curve.genus());
  return integrate_du(curve, pd, lift_path(curve, path), tol);
}

struct Divisor {
  std::vector<std::pair<CurvePoint, int>> terms;

  int degree() const {
    int d = 0;
    for (const auto& [p, m] : terms) d += m;
    return d;
  }
  bool positive() const {
    return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second > 0; });
  }
};

inline CVector aj_divisor_path_integral(const Curve& curve, const PeriodData& pd, const Divisor& d, double tol = 1e-12) {
  CVector u = CVector::Zero(curve.genus());
  for (const auto& [p, m] : d.terms) u += static_cast<double>(m) * aj_path_integral(curve, pd, p, tol);
  return u;
}

inline CVector aj_divisor(const Curve& curve, const PeriodData& pd, const Divisor& d, double tol = 1e-12) {
  return reduce(aj_divisor_path_integral(curve, pd, d, tol), pd.period_matrix);
}

/// A random regular point of the curve, kept away from the branch points.
template <class Rng>
CurvePoint random_curve_point(const Curve& curve, Rng& rng) {
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (cd b : curve.branch_points()) {
    lo_re = std::min(lo_re, b.real());
    hi_re = std::max(hi_re, b.real());
    lo_im = std::min(lo_im, b.imag());
    hi_im = std::max(hi_im, b.imag());
  }
  const double pad = 0.5 * curve.min_separation() + 0.5;
  std::uniform_real_distribution<double> re(lo_re - pad, hi_re + pad), im(lo_im - pad, hi_im + pad);
  std::bernoulli_distribution sheet(0.5);
  while (true) {
    const cd x{re(rng), im(rng)};
    bool clear = true;
    for (cd b : curve.branch_points()) clear &= std::abs(x - b) > 0.1 * curve.min_separation();
    if (!clear) continue;
    return curve.point(x, sheet(rng) ? 1 : -1);
  }
}

/// Random point of C^g with characteristic uniform in [0, 2)^{2g}.
template <class Rng>
CVector random_jacobian_point(const CMatrix& pi_matrix, Rng& rng) {
  const int g = static_cast<int>(pi_matrix.rows());
  std::uniform_real_distribution<double> d(0.0, 2.0);
  ThetaChar c = ThetaChar::zero(g);
  for (int i = 0; i < g; ++i) {
    c.eps(i) = d(rng);
    c.eps_prime(i) = d(rng);
  }
  return from_char(c, pi_matrix);
}

/// Median of |theta| exp(-pi y^T Y^{-1} y) over random points of the Jacobian.
inline double typical_theta_scale(const ThetaFunction& theta, std::uint64_t seed = 7, int count = 50) {
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  for (int i = 0; i < count; ++i) values.push_back(theta.normalized_abs(random_jacobian_point(theta.period_matrix(), rng)));
  std::nth_element(values.begin(), values.begin() + count / 2, values.end());
  return values[count / 2];
}

struct RiemannConstants {
  CVector value;
  ThetaChar characteristic;
  Alignment alignment = Alignment::right;
  double worst_ratio = 0.0;  // max normalized |theta(u(D) + K)| / scale over the samples
};

/// Riemann constants for the base point P_{2g+2}, taken from the
/// characteristic pattern [1...1 ; ...0101] and accepted only when theta
/// vanishes on u(D) + K for random positive divisors D of degree g - 1.
inline RiemannConstants riemann_constants(const Curve& curve, const PeriodData& pd, const ThetaFunction& theta,
                                          std::uint64_t seed = 11, int samples = 20, double tol = 1e-7) {
  const int g = curve.genus();
  if (g < 1 || g > 4) fail(ErrorCode::IndexOutOfRange, "genus must be in 1..4");
  const double scale = typical_theta_scale(theta);
  std::vector<CVector> images;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    CVector u = CVector::Zero(g);
    for (int k = 0; k < g - 1; ++k) u += aj_path_integral(curve, pd, random_curve_point(curve, rng));
    images.push_back(u);
  }
  for (Alignment align : {Alignment::right, Alignment::left}) {
    const ThetaChar c = riemann_constants_pattern(g, align);
    const CVector k = from_char(c, pd.period_matrix);
    double worst = 0.0;
    for (const CVector& u : images) worst = std::max(worst, theta.normalized_abs(u + k) / scale);
    if (worst < tol) return {k, c, align, worst};
  }
  fail(ErrorCode::RiemannConstantValidationFailed,
       "theta does not vanish on u(D) + K for either reading of the characteristic pattern");
}

}  // namespace hyperjac
