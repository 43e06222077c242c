#pragma once

#include "hyperjac/ajmap.hpp"

#include <memory>

namespace hyperjac {

/// Everything derived from one curve that the locus and third-kind code
/// need: periods, the theta function of Pi, the validated Riemann constants
/// and the median theta modulus used to make residuals dimensionless.
struct Model {
  Curve curve;
  PeriodData periods;
  ThetaFunction theta;
  RiemannConstants riemann;
  double scale;

  int genus() const { return curve.genus(); }
  const CMatrix& period_matrix() const { return periods.period_matrix; }
  const CVector& K() const { return riemann.value; }
};

using ModelPtr = std::shared_ptr<const Model>;

struct ModelOptions {
  double period_tol = 1e-13;
  double theta_tol = 1e-13;
  std::uint64_t seed = 11;
};

inline ModelPtr make_model(const Curve& curve, const ModelOptions& opt = {}) {
  PeriodData pd = compute_periods(curve, opt.period_tol);
  ThetaFunction th(pd.period_matrix, opt.theta_tol);
  RiemannConstants k = riemann_constants(curve, pd, th, opt.seed);
  const double scale = typical_theta_scale(th);
  return std::make_shared<const Model>(Model{curve, std::move(pd), std::move(th), std::move(k), scale});
}

}  // namespace hyperjac
