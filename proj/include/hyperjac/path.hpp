#pragma once

// Integration of differentials h(x, w) dx / w along straight segments of the
// x-plane lifted to the curve. Along a segment the sheet function is written
// as w = sign * prod_j S_j(t) where every factor S_j is an explicit,
// continuous square root of (x(t) - x_j); no stepping is needed. Endpoints
// that are branch points get a change of variable that removes the
// inverse-square-root singularity of dx / w.

#include "hyperjac/curve.hpp"
#include "hyperjac/quadrature.hpp"

#include <optional>
#include <vector>

namespace hyperjac {

class LiftedSegment {
 public:
  LiftedSegment(const Curve& curve, cd a, cd b, int a_branch = -1, int b_branch = -1)
      : curve_(&curve), a_(a), b_(b), a_branch_(a_branch), b_branch_(b_branch) {
    const cd mid = 0.5 * (a + b);
    length_ = std::abs(b - a);
    half_angle_a_ = std::polar(1.0, 0.5 * std::arg(b - a));
    half_angle_b_ = std::polar(1.0, 0.5 * std::arg(a - b));
    rotations_.resize(static_cast<std::size_t>(curve.branch_count()));
    for (int k = 0; k < curve.branch_count(); ++k) {
      const double beta = std::arg(mid - curve.branch(k));
      rotations_[k] = {std::polar(1.0, -beta), std::polar(1.0, 0.5 * beta)};
    }
  }

  cd start() const noexcept { return a_; }
  cd end() const noexcept { return b_; }
  int start_branch() const noexcept { return a_branch_; }
  int end_branch() const noexcept { return b_branch_; }
  int sign() const noexcept { return sign_; }
  void set_sign(int s) noexcept { sign_ = s >= 0 ? 1 : -1; }
  void flip() noexcept { sign_ = -sign_; }

  /// Sheet value with sign +1 at parameter t in [0, 1]. `one_minus_t` is
  /// passed separately to keep accuracy next to the far endpoint.
  cd base_w(double t, double one_minus_t) const {
    const cd x = t <= 0.5 ? a_ + t * (b_ - a_) : b_ - one_minus_t * (b_ - a_);
    cd p = 1.0;
    for (int k = 0; k < curve_->branch_count(); ++k) {
      if (k == a_branch_) {
        p *= half_angle_a_ * std::sqrt(t * length_);
      } else if (k == b_branch_) {
        p *= half_angle_b_ * std::sqrt(one_minus_t * length_);
      } else {
        const auto& [rot, half] = rotations_[k];
        p *= half * std::sqrt((x - curve_->branch(k)) * rot);
      }
    }
    return p;
  }
  cd base_w(double t) const { return base_w(t, 1.0 - t); }

  cd w_at(double t) const { return static_cast<double>(sign_) * base_w(t); }
  cd x_at(double t) const { return a_ + t * (b_ - a_); }

  struct Node {
    cd x;
    cd w;
    cd dx;  // dx / d(theta)
  };

  /// Evaluation at the integration variable theta in [0, 1].
  Node node(double theta) const {
    double t = theta, u = 1.0 - theta, dt = 1.0;
    const bool sa = a_branch_ >= 0, sb = b_branch_ >= 0;
    if (sa && sb) {
      const double s = std::sin(0.5 * pi * theta), c = std::cos(0.5 * pi * theta);
      t = s * s;
      u = c * c;
      dt = 0.5 * pi * std::sin(pi * theta);
    } else if (sa) {
      t = theta * theta;
      u = 1.0 - t;
      dt = 2.0 * theta;
    } else if (sb) {
      const double r = 1.0 - theta;
      u = r * r;
      t = 1.0 - u;
      dt = 2.0 * r;
    }
    const cd x = t <= 0.5 ? a_ + t * (b_ - a_) : b_ - u * (b_ - a_);
    return {x, static_cast<double>(sign_) * base_w(t, u), (b_ - a_) * dt};
  }

  /// Map from the plain segment parameter t to the integration variable.
  double theta_of_t(double t) const {
    const bool sa = a_branch_ >= 0, sb = b_branch_ >= 0;
    if (sa && sb) return 2.0 / pi * std::asin(std::sqrt(std::clamp(t, 0.0, 1.0)));
    if (sa) return std::sqrt(std::clamp(t, 0.0, 1.0));
    if (sb) return 1.0 - std::sqrt(std::clamp(1.0 - t, 0.0, 1.0));
    return t;
  }

  /// integral of h(x, w) dx / w over theta in [theta0, theta1]; h returns a
  /// vector of length dim.
  template <class H>
  CVector integrate(H&& h, Eigen::Index dim, double tol, double theta0 = 0.0, double theta1 = 1.0) const {
    auto integrand = [&](double theta) -> CVector {
      const Node n = node(theta);
      return h(n.x, n.w) * (n.dx / n.w);
    };
    quad::AdaptiveOptions opt;
    opt.abs_tol = tol;
    return quad::integrate(integrand, theta0, theta1, dim, opt);
  }

 private:
  const Curve* curve_;
  cd a_, b_;
  int a_branch_, b_branch_;
  int sign_ = 1;
  double length_ = 0.0;
  cd half_angle_a_, half_angle_b_;
  std::vector<std::pair<cd, cd>> rotations_;
};

/// Sheet label of a segment relative to the reference sheet w1, read just
/// off the segment on its left side near parameter t.
inline int sheet_label(const Curve& curve, const LiftedSegment& seg, double t) {
  const cd dir = (seg.end() - seg.start()) / std::abs(seg.end() - seg.start());
  const double offset = 1e-7 * std::min(curve.min_separation(), std::abs(seg.end() - seg.start()));
  const cd probe = seg.x_at(t) + I * dir * offset;
  const cd ref = curve.w1(probe);
  const cd here = seg.w_at(t);
  return std::real(here / ref) >= 0 ? 1 : -1;
}

/// A chain of lifted segments forming a continuous path on the curve.
struct LiftedPath {
  std::vector<LiftedSegment> segments;

  template <class H>
  CVector integrate(H&& h, Eigen::Index dim, double tol) const {
    CVector total = CVector::Zero(dim);
    const double share = segments.empty() ? tol : tol / static_cast<double>(segments.size());
    for (const auto& s : segments) total += s.integrate(h, dim, share);
    return total;
  }

  CurvePoint end_point() const {
    const auto& s = segments.back();
    if (s.end_branch() >= 0) return {s.end(), 0.0};
    return {s.end(), s.w_at(1.0)};
  }
};

struct RouteVertex {
  cd x;
  int branch = -1;
};

namespace detail {

constexpr double kLabelProbe = 1e-4;

inline std::vector<LiftedSegment> make_segments(const Curve& curve, const std::vector<RouteVertex>& v) {
  std::vector<LiftedSegment> segs;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) segs.emplace_back(curve, v[i].x, v[i + 1].x, v[i].branch, v[i + 1].branch);
  return segs;
}

/// Assigns segment signs: continuity at regular vertices; at a branch-point
/// vertex the label relative to w1 is kept, which corresponds to turning
/// around the branch point on the side away from its cut.
inline void assign_signs(const Curve& curve, std::vector<LiftedSegment>& segs, std::optional<cd> start_w,
                         int start_label) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    auto& s = segs[i];
    s.set_sign(1);
    if (i == 0) {
      if (start_w && s.start_branch() < 0) {
        if (std::real(*start_w / s.base_w(0.0)) < 0) s.flip();
      } else if (sheet_label(curve, s, kLabelProbe) != start_label) {
        s.flip();
      }
      continue;
    }
    const auto& prev = segs[i - 1];
    if (s.start_branch() < 0) {
      if (std::real(prev.w_at(1.0) / s.base_w(0.0)) < 0) s.flip();
    } else {
      const int label = sheet_label(curve, prev, 1.0 - kLabelProbe);
      if (sheet_label(curve, s, kLabelProbe) != label) s.flip();
    }
  }
}

}  // namespace detail

/// Lift of an explicit waypoint polyline starting at a regular point.
inline LiftedPath lift_path(const Curve& curve, const PathSpec& path) {
  const std::vector<cd> v = path.vertices();
  check_clearance(curve, v);
  std::vector<RouteVertex> rv;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto bi = curve.branch_index(v[i]);
    rv.push_back({bi ? curve.branch(*bi) : v[i], bi ? *bi : -1});
  }
  LiftedPath lp{detail::make_segments(curve, rv)};
  detail::assign_signs(curve, lp.segments, path.start_point.w, 1);
  return lp;
}

/// Polyline from `from` to `to` that never crosses the cuts
/// [x_{2k-1}, x_{2k}], k = 1..g (the a-cycle realizations), and keeps
/// clearance from branch points by routing through them when necessary.
inline std::vector<RouteVertex> route_avoiding_cuts(const Curve& curve, RouteVertex from, RouteVertex to,
                                                    int depth = 0) {
  if (depth > 24) fail(ErrorCode::PathConstructionFailed, "routing recursion limit reached");
  const double delta = curve.clearance();
  const int g = curve.genus();
  double best_t = 2.0;
  int via = -1;
  for (int k = 0; k < curve.branch_count(); ++k) {
    if (k == from.branch || k == to.branch) continue;
    double t = 0.0;
    if (detail::point_segment_distance(curve.branch(k), from.x, to.x, &t) < delta && t < best_t) {
      best_t = t;
      via = k;
    }
  }
  for (int j = 0; j < g; ++j) {
    const int p = 2 * j, q = 2 * j + 1;
    if (from.branch == p || from.branch == q || to.branch == p || to.branch == q) continue;
    double t = 0.0;
    if (detail::segments_cross(from.x, to.x, curve.branch(p), curve.branch(q), &t) && t < best_t) {
      best_t = t;
      const cd hit = from.x + t * (to.x - from.x);
      via = std::abs(hit - curve.branch(p)) <= std::abs(hit - curve.branch(q)) ? p : q;
    }
  }
  if (via < 0) return {from, to};
  const RouteVertex mid{curve.branch(via), via};
  auto head = route_avoiding_cuts(curve, from, mid, depth + 1);
  auto tail = route_avoiding_cuts(curve, mid, to, depth + 1);
  head.insert(head.end(), tail.begin() + 1, tail.end());
  return head;
}

/// Integral of the differentials h(x, w) dx / w from the branch point
/// x_{2g+2} to the curve point `target` along a cut-avoiding route. The
/// returned lift always ends at `target` (the involution image of the route
/// is used when the natural lift ends at J(target)); `negated` reports that.
struct BaseRouteResult {
  LiftedPath path;
  bool negated = false;
};

inline BaseRouteResult route_from_base(const Curve& curve, const CurvePoint& target) {
  const int base = curve.branch_count() - 1;
  const auto tb = curve.branch_index(target.x);
  RouteVertex to{tb ? curve.branch(*tb) : target.x, tb ? *tb : -1};
  BaseRouteResult out;
  if (tb && *tb == base) return out;
  const auto route = route_avoiding_cuts(curve, {curve.branch(base), base}, to);
  out.path.segments = detail::make_segments(curve, route);
  detail::assign_signs(curve, out.path.segments, std::nullopt, 1);
  if (!tb) {
    const cd arrived = out.path.segments.back().w_at(1.0);
    if (std::real(arrived / target.w) < 0) {
      for (auto& s : out.path.segments) s.flip();
      out.negated = true;
    }
  }
  return out;
}

}  // namespace hyperjac
