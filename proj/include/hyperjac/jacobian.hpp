#pragma once

#include "hyperjac/theta.hpp"

#include <cmath>
#include <vector>

namespace hyperjac {

/// u = (eps' + Pi eps) / 2 solved for the real vectors eps, eps'.
inline ThetaChar to_char(const CVector& u, const CMatrix& pi_matrix) {
  const RMatrix y = pi_matrix.imag();
  const RVector eps = 2.0 * y.fullPivLu().solve(RVector(u.imag()));
  const RVector eps_prime = 2.0 * u.real() - pi_matrix.real() * eps;
  return {eps, eps_prime};
}

inline CVector from_char(const ThetaChar& c, const CMatrix& pi_matrix) {
  return 0.5 * (c.eps_prime.cast<cd>() + pi_matrix * c.eps.cast<cd>());
}

namespace detail {
inline double mod2(double v) {
  double r = std::fmod(v, 2.0);
  if (r < 0) r += 2.0;
  if (r >= 2.0) r -= 2.0;
  return r;
}
}  // namespace detail

/// Characteristic with every entry reduced into [0, 2).
inline ThetaChar reduce_char(const ThetaChar& c) {
  ThetaChar r = c;
  for (Eigen::Index i = 0; i < c.eps.size(); ++i) {
    r.eps(i) = detail::mod2(c.eps(i));
    r.eps_prime(i) = detail::mod2(c.eps_prime(i));
  }
  return r;
}

/// Canonical representative of u modulo L(Pi) = Z^g + Pi Z^g.
inline CVector reduce(const CVector& u, const CMatrix& pi_matrix) {
  return from_char(reduce_char(to_char(u, pi_matrix)), pi_matrix);
}

/// Distance between u and v in C^g / L(Pi): minimum over m in [-2, 2]^g
/// and all integer m' of |u - v - m' - Pi m|.
inline double lattice_distance(const CVector& u, const CVector& v, const CMatrix& pi_matrix) {
  const int g = static_cast<int>(pi_matrix.rows());
  const CVector d = reduce(u, pi_matrix) - reduce(v, pi_matrix);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> m(g, -2);
  while (true) {
    CVector shifted = d;
    for (int i = 0; i < g; ++i) shifted -= static_cast<double>(m[i]) * pi_matrix.col(i);
    double norm2 = 0.0;
    for (int i = 0; i < g; ++i) {
      const double re = shifted(i).real() - std::round(shifted(i).real());
      norm2 += re * re + shifted(i).imag() * shifted(i).imag();
    }
    best = std::min(best, std::sqrt(norm2));
    int k = 0;
    while (k < g && ++m[k] > 2) m[k++] = -2;
    if (k == g) break;
  }
  return best;
}

/// Characteristic of u(P_s) for the base point P_{2g+2}:
///   P_{2k-1} -> [E_k ; E_1 + ... + E_{k-1}],  P_{2k} -> [E_k ; E_1 + ... + E_k],
///   P_{2g+1} -> [0 ; E_1 + ... + E_g],        P_{2g+2} -> [0 ; 0].
inline ThetaChar weierstrass_char(int s, int g) {
  if (g < 1) fail(ErrorCode::IndexOutOfRange, "genus must be positive");
  if (s < 1 || s > 2 * g + 2)
    fail(ErrorCode::IndexOutOfRange, "Weierstrass index " + std::to_string(s) + " outside 1.." + std::to_string(2 * g + 2));
  ThetaChar c = ThetaChar::zero(g);
  if (s == 2 * g + 2) return c;
  if (s == 2 * g + 1) {
    c.eps_prime.setOnes();
    return c;
  }
  const int k = (s + 1) / 2;  // 1-based column
  c.eps(k - 1) = 1.0;
  const int ones = (s % 2 == 1) ? k - 1 : k;
  for (int i = 0; i < ones; ++i) c.eps_prime(i) = 1.0;
  return c;
}

enum class Alignment { right, left };

/// Characteristic pattern eps = (1, ..., 1), eps' = alternating 1, 0, ...
/// anchored at the right end (last entry 1) or at the left end (first entry 1).
inline ThetaChar riemann_constants_pattern(int g, Alignment align) {
  ThetaChar c = ThetaChar::zero(g);
  c.eps.setOnes();
  for (int i = 0; i < g; ++i) {
    const int from_anchor = align == Alignment::right ? g - 1 - i : i;
    c.eps_prime(i) = from_anchor % 2 == 0 ? 1.0 : 0.0;
  }
  return c;
}

/// Mod-2 sum of binary characteristics.
inline ThetaChar char_sum_mod2(const ThetaChar& a, const ThetaChar& b) {
  return reduce_char({a.eps + b.eps, a.eps_prime + b.eps_prime});
}

}  // namespace hyperjac
