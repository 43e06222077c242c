#pragma once

#include "hyperjac/core.hpp"

#include <array>
#include <cmath>
#include <map>
#include <vector>

namespace hyperjac::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline const GaussRule& gauss_legendre(int n) {
  static const GaussRule r16 = make_gauss_legendre(16);
  static const GaussRule r32 = make_gauss_legendre(32);
  if (n == 16) return r16;
  if (n == 32) return r32;
  thread_local std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

template <class F>
CVector apply_rule(const GaussRule& rule, F& f, double a, double b, Eigen::Index dim) {
  CVector acc = CVector::Zero(dim);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  int max_depth = 40;
  int max_panels = 20000;
};

/// Adaptive composite Gauss-Legendre integration of a smooth vector-valued
/// function f: [a, b] -> C^dim. Panels are bisected until the 16- and
/// 32-point rules agree to the panel's share of the tolerance.
template <class F>
CVector integrate(F&& f, double a, double b, Eigen::Index dim, const AdaptiveOptions& opt = {}) {
  const GaussRule& lo = gauss_legendre(16);
  const GaussRule& hi = gauss_legendre(32);
  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack{{a, b, 0}};
  CVector total = CVector::Zero(dim);
  const double length = std::abs(b - a);
  int panels = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    if (++panels > opt.max_panels) fail(ErrorCode::QuadratureNonconvergence, "panel budget exhausted");
    const CVector fine = apply_rule(hi, f, p.a, p.b, dim);
    const CVector coarse = apply_rule(lo, f, p.a, p.b, dim);
    const double err = (fine - coarse).cwiseAbs().maxCoeff();
    const double share = length > 0 ? std::abs(p.b - p.a) / length : 1.0;
    const double floor = 64.0 * 2.2e-16 * fine.cwiseAbs().maxCoeff();
    if (!std::isfinite(err)) fail(ErrorCode::QuadratureNonconvergence, "non-finite integrand");
    if (err <= std::max(opt.abs_tol * share, floor)) {
      total += fine;
      continue;
    }
    if (p.depth >= opt.max_depth)
      fail(ErrorCode::QuadratureNonconvergence, "bisection depth limit reached");
    const double m = 0.5 * (p.a + p.b);
    stack.push_back({m, p.b, p.depth + 1});
    stack.push_back({p.a, m, p.depth + 1});
  }
  return total;
}

}  // namespace hyperjac::quad
