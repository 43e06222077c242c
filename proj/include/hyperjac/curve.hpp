#pragma once

#include "hyperjac/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <optional>
#include <utility>
#include <vector>

namespace hyperjac {

/// A point (x, w) on w^2 = prod_j (x - x_j).
struct CurvePoint {
  cd x;
  cd w;
};

inline CurvePoint involution(const CurvePoint& p) { return {p.x, -p.w}; }

namespace detail {

inline double point_segment_distance(cd p, cd a, cd b, double* param = nullptr) {
  const cd d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (param) *param = t;
  return std::abs(p - (a + t * d));
}

inline double cross(cd a, cd b) { return std::imag(std::conj(a) * b); }

/// True when the open segments (a, b) and (c, d) cross at a single interior point.
inline bool segments_cross(cd a, cd b, cd c, cd d, double* param = nullptr) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  const double scale = std::abs(b - a) * std::abs(d - c);
  const double eps = 1e-14 * scale;
  if (!(((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
        ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))))
    return false;
  if (param) *param = d3 / (d3 - d4);
  return true;
}

}  // namespace detail

/// Hyperelliptic curve w^2 = prod_{j=1}^{2g+2} (x - x_j) with branch points
/// kept in the order supplied. Consecutive pairs {x_{2k-1}, x_{2k}} are the
/// branch cuts; every basis and table convention refers to this order.
class Curve {
 public:
  Curve(std::vector<cd> branch_points, std::optional<double> clearance = std::nullopt) {
    const std::size_t n = branch_points.size();
    if (n < 4 || n % 2 != 0)
      fail(ErrorCode::OddCount, "need an even number >= 4 of branch points, got " + std::to_string(n));
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::abs(branch_points[i] - branch_points[j]);
        const double ref = std::max({1.0, std::abs(branch_points[i]), std::abs(branch_points[j])});
        if (d <= 1e-12 * ref)
          fail(ErrorCode::DuplicateBranchPoint,
               "branch points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
        min_sep = std::min(min_sep, d);
      }
    }
    branch_ = std::move(branch_points);
    genus_ = static_cast<int>(n - 2) / 2;
    min_separation_ = min_sep;
    clearance_ = clearance.value_or(0.05 * min_sep);
    if (!(clearance_ > 0.0)) fail(ErrorCode::InputError, "clearance must be positive");
  }

  int genus() const noexcept { return genus_; }
  int branch_count() const noexcept { return static_cast<int>(branch_.size()); }
  const std::vector<cd>& branch_points() const noexcept { return branch_; }
  /// 0-based access: branch(0) is x_1.
  cd branch(int k) const { return branch_.at(static_cast<std::size_t>(k)); }
  double clearance() const noexcept { return clearance_; }
  double min_separation() const noexcept { return min_separation_; }

  cd f(cd x) const {
    cd p = 1.0;
    for (cd b : branch_) p *= (x - b);
    return p;
  }

  /// f'(x) / f(x)
  cd log_derivative(cd x) const {
    cd s = 0.0;
    for (cd b : branch_) s += 1.0 / (x - b);
    return s;
  }

  std::optional<int> branch_index(cd x, double tol = 1e-12) const {
    for (int k = 0; k < branch_count(); ++k)
      if (std::abs(x - branch_[k]) <= tol * std::max(1.0, std::abs(x))) return k;
    return std::nullopt;
  }

  /// The reference sheet: single valued and analytic off the cuts
  /// [x_{2k-1}, x_{2k}], k = 1..g+1.
  cd w1(cd x) const {
    if (branch_index(x, 0.0)) return 0.0;
    cd p = 1.0;
    for (int k = 0; k + 1 < branch_count(); k += 2) {
      const cd a = branch_[k];
      const cd b = branch_[k + 1];
      p *= (x - a) * std::sqrt((x - b) / (x - a));
    }
    return p;
  }

  /// Point over x on the sheet w = sheet * w1(x).
  CurvePoint point(cd x, int sheet = 1) const { return {x, sheet >= 0 ? w1(x) : -w1(x)}; }

  double equation_residual(const CurvePoint& p) const {
    const cd fx = f(p.x);
    return std::abs(p.w * p.w - fx) / std::max(1.0, std::abs(fx));
  }

  bool on_curve(const CurvePoint& p, double tol = 1e-10) const { return equation_residual(p) <= tol; }

  bool is_weierstrass(const CurvePoint& p, double tol = 1e-12) const {
    return branch_index(p.x, tol).has_value();
  }

  /// Whether the polyline x_1 -> x_2 -> ... -> x_{2g+2} has no self-intersection.
  bool branch_polyline_is_simple() const {
    const int n = branch_count();
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = i + 2; j + 1 < n; ++j) {
        if (detail::segments_cross(branch_[i], branch_[i + 1], branch_[j], branch_[j + 1])) return false;
      }
      for (int k = 0; k < n; ++k) {
        if (k == i || k == i + 1) continue;
        if (detail::point_segment_distance(branch_[k], branch_[i], branch_[i + 1]) < 1e-9 * min_separation_)
          return false;
      }
    }
    return true;
  }

 private:
  std::vector<cd> branch_;
  int genus_ = 0;
  double min_separation_ = 0.0;
  double clearance_ = 0.0;
};

inline Curve make_curve(std::vector<cd> branch_points, std::optional<double> clearance = std::nullopt) {
  return Curve(std::move(branch_points), clearance);
}

/// Polyline in the x-plane together with the curve point that fixes the
/// starting sheet. `waypoints` lists the vertices after the start.
struct PathSpec {
  std::vector<cd> waypoints;
  CurvePoint start_point;

  std::vector<cd> vertices() const {
    std::vector<cd> v{start_point.x};
    for (cd p : waypoints)
      if (std::abs(p - v.back()) > 0.0) v.push_back(p);
    return v;
  }
};

/// Checks that every segment keeps distance >= clearance from all branch
/// points; a branch point is tolerated only as the first or last vertex.
inline void check_clearance(const Curve& curve, const std::vector<cd>& vertices) {
  const double delta = curve.clearance();
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const cd a = vertices[s];
    const cd b = vertices[s + 1];
    for (int k = 0; k < curve.branch_count(); ++k) {
      const cd x = curve.branch(k);
      const bool at_start = std::abs(a - x) <= 1e-12 * std::max(1.0, std::abs(x));
      const bool at_end = std::abs(b - x) <= 1e-12 * std::max(1.0, std::abs(x));
      if ((at_start && s == 0) || (at_end && s + 2 == vertices.size())) continue;
      if (at_start || at_end)
        fail(ErrorCode::PathTooCloseToBranchPoint, "branch point used as an interior vertex");
      if (detail::point_segment_distance(x, a, b) < delta)
        fail(ErrorCode::PathTooCloseToBranchPoint,
             "segment " + std::to_string(s) + " passes within clearance of branch point " + std::to_string(k + 1));
    }
  }
}

/// Analytic continuation of w along a polyline. Each step predicts w to
/// first order and keeps the square root of f closer to the prediction;
/// steps are halved until the relative change stays below 0.5.
inline CurvePoint continue_w(const Curve& curve, const PathSpec& path) {
  const std::vector<cd> v = path.vertices();
  check_clearance(curve, v);
  if (v.size() == 1) return path.start_point;

  cd x = path.start_point.x;
  cd w = path.start_point.w;
  constexpr double kMaxStep = 1.0 / 32.0;
  constexpr double kMinStep = 1e-13;
  constexpr long kMaxSamples = 2'000'000;
  long samples = 0;

  for (std::size_t seg = 0; seg + 1 < v.size(); ++seg) {
    const cd a = v[seg];
    const cd b = v[seg + 1];
    const bool ends_at_branch = seg + 2 == v.size() && curve.branch_index(b).has_value();
    double s = 0.0;
    double h = kMaxStep;
    if (w == 0.0) {
      // leaving a Weierstrass point: either lift is valid, take the principal root
      s = 1e-8;
      x = a + s * (b - a);
      w = std::sqrt(curve.f(x));
      h = 1e-8;
    }
    while (s < 1.0) {
      if (++samples > kMaxSamples) fail(ErrorCode::NonconvergentContinuation, "sample budget exhausted");
      const double s_new = std::min(1.0, s + h);
      const cd x_new = a + s_new * (b - a);
      if (ends_at_branch && std::abs(x_new - b) <= 1e-9 * std::abs(b - a)) {
        return {b, 0.0};
      }
      const cd root = std::sqrt(curve.f(x_new));
      const cd predicted = w + 0.5 * w * curve.log_derivative(x) * (x_new - x);
      const cd pick = std::abs(root - predicted) <= std::abs(-root - predicted) ? root : -root;
      const double rel_change = std::abs(pick - w) / std::abs(w);
      const double separation = std::abs(2.0 * pick);
      const bool unambiguous = std::abs(pick - predicted) < 0.25 * separation;
      if (rel_change < 0.5 && unambiguous) {
        s = s_new;
        x = x_new;
        w = pick;
        h = std::min(2.0 * h, kMaxStep);
      } else {
        h *= 0.5;
        if (h < kMinStep) fail(ErrorCode::NonconvergentContinuation, "step refinement limit reached");
      }
    }
    x = b;
  }
  return {x, w};
}

}  // namespace hyperjac
