#pragma once

// Shared fixtures and independent oracles for the test programs.

#include "hyperjac/hyperjac.hpp"

#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace testing_support {

using namespace hyperjac;

/// Branch points with increasing real parts (gaps in [0.8, 1.4]) and
/// imaginary parts in [-0.3, 0.3]; pairwise separation is at least 0.5.
inline Curve random_curve(int g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gap(0.8, 1.4), im(-0.3, 0.3);
  std::vector<cd> bp;
  double re = -0.55 * (2 * g + 1);
  for (int k = 0; k < 2 * g + 2; ++k) {
    bp.push_back({re, im(rng)});
    re += gap(rng);
  }
  return Curve(bp);
}

/// Models are expensive enough to be worth sharing between tests.
inline ModelPtr cached_model(int g, std::uint64_t seed) {
  static std::map<std::pair<int, std::uint64_t>, ModelPtr> cache;
  auto& m = cache[{g, seed}];
  if (!m) m = make_model(random_curve(g, seed));
  return m;
}

inline double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 4e-16 * a; ++i) {
    const double n = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = n;
  }
  return a;
}

/// Complete elliptic integral of the first kind K(k) = pi / (2 AGM(1, k')).
inline double ellint_k(double k) { return pi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

/// Period ratio of w^2 = (x - e1)(x - e2)(x - e3)(x - e4) for real
/// e1 < e2 < e3 < e4 with a around [e1, e2] and b across the gap [e2, e3]:
/// tau = i K(k') / K(k), k^2 = (e2 - e1)(e4 - e3) / ((e3 - e1)(e4 - e2)).
inline cd real_quartic_tau(double e1, double e2, double e3, double e4) {
  const double k2 = (e2 - e1) * (e4 - e3) / ((e3 - e1) * (e4 - e2));
  return {0.0, ellint_k(std::sqrt(1.0 - k2)) / ellint_k(std::sqrt(k2))};
}

/// Theta by plain summation over the box |n_i| <= r.
inline cd theta_box(const CVector& u, const CMatrix& p, int r) {
  const int g = static_cast<int>(u.size());
  std::vector<int> n(g, -r);
  cd total = 0.0;
  while (true) {
    Eigen::VectorXd v(g);
    for (int i = 0; i < g; ++i) v(i) = n[i];
    const CVector nv = v.cast<cd>();
    total += std::exp(I * pi * (nv.transpose() * p * nv)(0) + 2.0 * pi * I * (nv.transpose() * u)(0));
    int k = 0;
    while (k < g && ++n[k] > r) n[k++] = -r;
    if (k == g) break;
  }
  return total;
}

/// Regular curve point whose x stays `margin` away from every cut.
template <class Rng>
CurvePoint point_off_cuts(const Curve& c, Rng& rng, double margin = 0.15) {
  while (true) {
    const CurvePoint p = random_curve_point(c, rng);
    bool ok = true;
    for (int k = 0; k + 1 < c.branch_count(); k += 2)
      ok &= detail::point_segment_distance(p.x, c.branch(k), c.branch(k + 1)) >= margin;
    if (ok) return p;
  }
}

/// Closed rectangle around the branch points x_{2j}, ..., x_{2g+1} of a
/// curve whose branch points have increasing real parts. It crosses cut j
/// and cut g + 1 once each, so its lift is closed and meets a_j once.
inline PathSpec b_loop(const Curve& c, int j, int sheet, double pad = 0.5) {
  const int g = c.genus();
  double top = -1e300, bottom = 1e300;
  for (cd b : c.branch_points()) {
    top = std::max(top, b.imag());
    bottom = std::min(bottom, b.imag());
  }
  const double left = 0.5 * (c.branch(2 * j - 2).real() + c.branch(2 * j - 1).real());
  const double right = 0.5 * (c.branch(2 * g).real() + c.branch(2 * g + 1).real());
  const cd start{left, bottom - pad};
  PathSpec s;
  s.start_point = c.point(start, sheet);
  s.waypoints = {cd{right, bottom - pad}, cd{right, top + pad}, cd{left, top + pad}, start};
  return s;
}

}  // namespace testing_support
