#pragma once

// Normalized abelian integrals of the third kind with poles R, Q:
//   eta(P) = log theta[c](u(P) - u(R)) - log theta[c](u(P) - u(Q)) + const
// for an odd characteristic c, followed continuously along paths, and a
// quadrature oracle built from an explicit differential with the same
// residues and vanishing a-periods.

#include "hyperjac/model.hpp"

#include <optional>
#include <vector>

namespace hyperjac {

/// Lexicographically first odd binary characteristic whose theta vanishes at
/// 0 with nonzero gradient there.
inline ThetaChar pick_odd_char(const ThetaFunction& theta, double scale, CharConvention conv = CharConvention::half) {
  const int g = theta.genus();
  const CVector zero = CVector::Zero(g);
  for (const ThetaChar& c : binary_chars(g)) {
    if (char_parity(c) != Parity::odd) continue;
    if (std::abs(theta.with_char(c, zero, conv)) >= 1e-9 * scale) continue;
    if (theta.with_char_gradient(c, zero, conv).norm() <= 1e-6 * scale) continue;
    return c;
  }
  fail(ErrorCode::NoUsableOddCharacteristic, "no odd characteristic with theta[c](0) = 0 and nonzero gradient");
}

struct ThirdKindSpec {
  CurvePoint R;
  CurvePoint Q;
  ThetaChar odd_char;
  CVector uR;  // path integrals from the base point along cut-avoiding routes
  CVector uQ;
  CharConvention convention = CharConvention::half;
};

inline ThirdKindSpec make_third_kind(const Model& m, const CurvePoint& r, const CurvePoint& q,
                                     std::optional<ThetaChar> odd_char = std::nullopt,
                                     CharConvention conv = CharConvention::half) {
  if (std::abs(r.x - q.x) <= 1e-12 * std::max(1.0, std::abs(r.x)) && std::abs(r.w - q.w) <= 1e-10 * std::max(1.0, std::abs(r.w)))
    fail(ErrorCode::CoincidentPoints, "poles R and Q coincide");
  ThirdKindSpec s;
  s.R = r;
  s.Q = q;
  s.convention = conv;
  s.odd_char = odd_char ? *odd_char : pick_odd_char(m.theta, m.scale, conv);
  if (char_parity(s.odd_char) != Parity::odd) fail(ErrorCode::InputError, "characteristic is not odd");
  s.uR = aj_path_integral(m.curve, m.periods, r);
  s.uQ = aj_path_integral(m.curve, m.periods, q);
  return s;
}

/// Swapped poles; the increments change sign.
inline ThirdKindSpec swapped(const ThirdKindSpec& s) {
  ThirdKindSpec t = s;
  std::swap(t.R, t.Q);
  std::swap(t.uR, t.uQ);
  return t;
}

struct EtaResult {
  cd increment;
  int branch_windings = 0;  // 2 pi multiples beyond the principal argument of the quotient
  int evaluations = 0;
};

namespace detail {

/// State of the theta quotient at one point: the normalized values whose
/// ratio carries the phase, and the real log-scale difference.
struct QuotientState {
  cd ratio;
  double log_scale = 0.0;
};

inline QuotientState quotient_state(const Model& m, const ThirdKindSpec& s, const CVector& u) {
  const auto [lr, zr] = m.theta.char_shift(s.odd_char, u - s.uR, s.convention);
  const auto [lq, zq] = m.theta.char_shift(s.odd_char, u - s.uQ, s.convention);
  const cd a = m.theta.normalized(zr);
  const cd b = m.theta.normalized(zq);
  return {a / b, m.theta.log_scale(zr) - m.theta.log_scale(zq) + (lr - lq).real()};
}

inline bool passes_near(const std::vector<cd>& v, cd x, double radius) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (point_segment_distance(x, v[i], v[i + 1]) < radius) return true;
  return false;
}

class EtaAccumulator {
 public:
  EtaAccumulator(const Model& m, const ThirdKindSpec& s, const CVector& u0) : m_(m), s_(s) {
    first_ = last_ = quotient_state(m, s, u0);
  }

  /// Tries to advance to u; false if the quotient turns by pi/2 or more.
  bool step(const CVector& u) {
    const QuotientState q = quotient_state(m_, s_, u);
    ++evaluations_;
    const cd turn = q.ratio / last_.ratio;
    if (!(std::abs(std::arg(turn)) < 0.5 * pi) || !std::isfinite(std::abs(turn))) return false;
    total_ += cd(std::log(std::abs(turn)) + q.log_scale - last_.log_scale, std::arg(turn));
    last_ = q;
    return true;
  }

  EtaResult result() const {
    EtaResult r;
    r.increment = total_;
    r.evaluations = evaluations_;
    const double principal = std::arg(last_.ratio / first_.ratio);
    r.branch_windings = static_cast<int>(std::lround((total_.imag() - principal) / (2.0 * pi)));
    return r;
  }

 private:
  const Model& m_;
  const ThirdKindSpec& s_;
  QuotientState first_, last_;
  cd total_ = 0.0;
  int evaluations_ = 0;
};

}  // namespace detail

struct EtaOptions {
  double pole_clearance = 1e-8;  // minimal x-distance of the path from the poles
  double tol = 1e-12;            // quadrature tolerance for du
  int initial_pieces = 8;
  double min_piece = 1e-12;
};

/// eta(P_end) - eta(P_start) along the lifted polyline; u(P) is carried
/// along by integrating du, and sub-intervals are bisected until the
/// theta quotient turns by less than pi/2 per step.
inline EtaResult eta_along(const Model& m, const ThirdKindSpec& s, const PathSpec& path, const EtaOptions& opt = {}) {
  const std::vector<cd> v = path.vertices();
  for (const CurvePoint* p : {&s.R, &s.Q})
    if (detail::passes_near(v, p->x, opt.pole_clearance) ||
        (v.size() == 1 && std::abs(v[0] - p->x) < opt.pole_clearance))
      fail(ErrorCode::PathThroughPole, "path passes through a pole of the integral");
  const int g = m.genus();
  CVector u = aj_path_integral(m.curve, m.periods, path.start_point);
  detail::EtaAccumulator acc(m, s, u);
  if (v.size() < 2) return acc.result();
  const LiftedPath lp = lift_path(m.curve, path);
  const auto mono = detail::monomials(g);
  for (const auto& seg : lp.segments) {
    std::vector<std::pair<double, double>> stack;
    for (int k = opt.initial_pieces; k > 0; --k)
      stack.emplace_back(static_cast<double>(k - 1) / opt.initial_pieces, static_cast<double>(k) / opt.initial_pieces);
    while (!stack.empty()) {
      const auto [a, b] = stack.back();
      stack.pop_back();
      const CVector next = u + m.periods.normalizer * seg.integrate(mono, g, opt.tol, a, b);
      if (acc.step(next)) {
        u = next;
        continue;
      }
      if (b - a < opt.min_piece) fail(ErrorCode::LogBranchLost, "argument of the theta quotient could not be followed");
      const double mid = 0.5 * (a + b);
      stack.emplace_back(mid, b);
      stack.emplace_back(a, mid);
    }
  }
  return acc.result();
}

/// Increment along a sequence of Jacobian points (for instance a trace of
/// u(X)); the points must be close enough for the quotient to turn by less
/// than pi/2 between neighbours.
inline EtaResult eta_along_samples(const Model& m, const ThirdKindSpec& s, const std::vector<CVector>& us) {
  if (us.empty()) return {};
  detail::EtaAccumulator acc(m, s, us.front());
  for (std::size_t i = 1; i < us.size(); ++i)
    if (!acc.step(us[i])) fail(ErrorCode::LogBranchLost, "samples too far apart to follow the log branch");
  return acc.result();
}

namespace detail {

/// (1/2)[(w + w_R)/(x - x_R) - (w + w_Q)/(x - x_Q)], to be multiplied by dx / w.
inline auto third_kind_numerator(const CurvePoint& r, const CurvePoint& q) {
  return [r, q](cd x, cd w) { return 0.5 * ((w + r.w) / (x - r.x) - (w + q.w) / (x - q.x)); };
}

/// a-periods of the uncorrected differential; only its w-odd part
/// (1/2)[w_R/(x - x_R) - w_Q/(x - x_Q)] dx / w survives on a collapsed cycle.
inline CVector third_kind_a_periods(const Curve& curve, const CurvePoint& r, const CurvePoint& q, double tol) {
  const int g = curve.genus();
  CVector p(g);
  auto odd = [&](cd x, cd) {
    CVector out(1);
    out(0) = 0.5 * (r.w / (x - r.x) - q.w / (x - q.x));
    return out;
  };
  for (int j = 1; j <= g; ++j) {
    const CycleSpec c = cycle(curve, CycleKind::a, j);
    cd total = 0.0;
    for (const auto& piece : c.pieces) total += static_cast<double>(piece.weight) * piece_segment(curve, piece).integrate(odd, 1, tol)(0);
    p(j - 1) = total;
  }
  return p;
}

}  // namespace detail

/// Direct quadrature of the normalized third-kind differential with
/// residue +1 at R and -1 at Q along the lifted polyline.
inline cd oracle_third_kind(const Model& m, const CurvePoint& r, const CurvePoint& q, const PathSpec& path,
                            double tol = 1e-12) {
  const int g = m.genus();
  if (path.vertices().size() < 2) return 0.0;
  const CVector p = detail::third_kind_a_periods(m.curve, r, q, tol);
  const auto num = detail::third_kind_numerator(r, q);
  const auto mono = detail::monomials(g);
  auto h = [&](cd x, cd w) {
    CVector out(g + 1);
    out(0) = num(x, w);
    out.tail(g) = mono(x, w);
    return out;
  };
  const CVector raw = lift_path(m.curve, path).integrate(h, g + 1, tol);
  const CVector du = m.periods.normalizer * raw.tail(g);
  return raw(0) - (p.transpose() * du)(0);
}

/// Closed polygon of `n` vertices and radius `radius` around the pole x0,
/// starting on the sheet of the given point.
inline PathSpec circle_path(const Curve& curve, const CurvePoint& center, double radius, int n = 32) {
  PathSpec s;
  const cd start = center.x + radius;
  const int sheet = std::real(curve.w1(center.x) / center.w) >= 0 ? 1 : -1;
  s.start_point = curve.point(start, sheet);
  for (int k = 1; k <= n; ++k) s.waypoints.push_back(center.x + std::polar(radius, 2.0 * pi * k / n));
  s.waypoints.back() = start;
  return s;
}

}  // namespace hyperjac
