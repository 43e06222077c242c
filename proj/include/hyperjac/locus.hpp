#pragma once

// Systems of shifted theta equations theta(u - s_k + K) = 0 whose common
// zeros contain the Abel-Jacobi image u(X) of a genus 3 or 4 curve, plus
// the tools to verify, classify and follow their solutions.

#include "hyperjac/model.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <optional>
#include <string>
#include <vector>

namespace hyperjac {

enum class SystemKind { g3_pair, g3_triple, g4_pairs, g4_quad, custom };

inline std::string_view to_string(SystemKind k) {
  switch (k) {
    case SystemKind::g3_pair: return "g3_pair";
    case SystemKind::g3_triple: return "g3_triple";
    case SystemKind::g4_pairs: return "g4_pairs";
    case SystemKind::g4_quad: return "g4_quad";
    case SystemKind::custom: return "custom";
  }
  return "custom";
}

/// A piece of the predicted solution set: u(X) + offset, or a single point.
struct Component {
  enum class Kind { curve_image, shifted_image, isolated_point };
  Kind kind = Kind::curve_image;
  std::string id;
  CVector offset;
};

struct ThetaSystem {
  ModelPtr model;
  SystemKind kind = SystemKind::custom;
  std::vector<CVector> shifts;
  // integer characteristics of the shifts when they are sums of Weierstrass images
  std::optional<std::vector<ThetaChar>> shift_chars;
  std::vector<Component> components;

  int genus() const { return model->genus(); }
  std::size_t size() const { return shifts.size(); }
  double scale() const { return model->scale; }
};

namespace detail {

inline bool same_point(const CurvePoint& p, const CurvePoint& q) {
  const double sx = std::max(1.0, std::abs(p.x));
  const double sw = std::max(1.0, std::abs(p.w));
  return std::abs(p.x - q.x) <= 1e-10 * sx && std::abs(p.w - q.w) <= 1e-8 * sw;
}

inline void require_genus(const Model& m, int g, SystemKind kind) {
  if (m.genus() != g)
    fail(ErrorCode::GenusMismatch, std::string(to_string(kind)) + " needs genus " + std::to_string(g) + ", curve has genus " +
                                       std::to_string(m.genus()));
}

inline void require_distinct(const std::vector<CurvePoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (same_point(pts[i], pts[j]))
        fail(ErrorCode::CoincidentPoints, "auxiliary points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
}

inline void require_not_j_equivalent(const CurvePoint& a, const CurvePoint& b, const std::string& name) {
  if (same_point(a, involution(b)))
    fail(ErrorCode::JEquivalentPair, "pair " + name + " consists of J-equivalent points");
}

/// Shifts and predicted components from the images of the auxiliary points.
/// `chars`, when present, are the integer characteristics of those images.
inline ThetaSystem assemble(ModelPtr model, SystemKind kind, const std::vector<CVector>& img,
                            const std::optional<std::vector<ThetaChar>>& chars) {
  const int g = model->genus();
  ThetaSystem sys;
  sys.model = std::move(model);
  sys.kind = kind;
  std::vector<ThetaChar> sc;
  auto add_shift = [&](std::initializer_list<int> idx) {
    CVector s = CVector::Zero(g);
    ThetaChar c = ThetaChar::zero(g);
    for (int i : idx) {
      s += img[i];
      if (chars) {
        c.eps += (*chars)[i].eps;
        c.eps_prime += (*chars)[i].eps_prime;
      }
    }
    sys.shifts.push_back(s);
    sc.push_back(c);
  };
  sys.components.push_back({Component::Kind::curve_image, "X", CVector::Zero(g)});
  switch (kind) {
    case SystemKind::g3_pair:
      add_shift({0});
      add_shift({1});
      sys.components.push_back({Component::Kind::shifted_image, "X+P+Q", img[0] + img[1]});
      break;
    case SystemKind::g3_triple:
      add_shift({0});
      add_shift({1});
      add_shift({2});
      sys.components.push_back({Component::Kind::isolated_point, "P+Q+R", img[0] + img[1] + img[2]});
      break;
    case SystemKind::g4_pairs:
      add_shift({});
      add_shift({0, 1});
      add_shift({2, 3});
      for (int j = 0; j < 2; ++j)
        for (int s = 0; s < 2; ++s)
          sys.components.push_back({Component::Kind::shifted_image,
                                    "X+P" + std::to_string(j + 1) + "+Q" + std::to_string(s + 1), img[j] + img[2 + s]});
      break;
    case SystemKind::g4_quad:
      add_shift({});
      add_shift({0, 1});
      add_shift({2, 3});
      add_shift({4, 5});
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int s = 0; s < 2; ++s)
            sys.components.push_back({Component::Kind::isolated_point,
                                      "P" + std::to_string(j + 1) + "+Q" + std::to_string(k + 1) + "+R" + std::to_string(s + 1),
                                      img[j] + img[2 + k] + img[4 + s]});
      break;
    case SystemKind::custom:
      break;
  }
  if (chars) sys.shift_chars = std::move(sc);
  return sys;
}

inline std::vector<CVector> images(const Model& m, const std::vector<CurvePoint>& pts) {
  std::vector<CVector> out;
  for (const auto& p : pts) out.push_back(aj_path_integral(m.curve, m.periods, p));
  return out;
}

}  // namespace detail

/// theta(u - u(P) + K) = theta(u - u(Q) + K) = 0: u(X) and u(X) + u(P + Q).
inline ThetaSystem system_g3_pair(ModelPtr model, const CurvePoint& p, const CurvePoint& q) {
  detail::require_genus(*model, 3, SystemKind::g3_pair);
  detail::require_distinct({p, q});
  const auto img = detail::images(*model, {p, q});
  return detail::assemble(std::move(model), SystemKind::g3_pair, img, std::nullopt);
}

/// Three shifted equations: u(X) and the single point u(P + Q + R).
inline ThetaSystem system_g3_triple(ModelPtr model, const CurvePoint& p, const CurvePoint& q, const CurvePoint& r) {
  detail::require_genus(*model, 3, SystemKind::g3_triple);
  detail::require_distinct({p, q, r});
  const auto img = detail::images(*model, {p, q, r});
  return detail::assemble(std::move(model), SystemKind::g3_triple, img, std::nullopt);
}

/// theta(u + K) = theta(u - u(P1 + P2) + K) = theta(u - u(Q1 + Q2) + K) = 0:
/// u(X) and its four shifts by u(P_j + Q_s).
inline ThetaSystem system_g4_pairs(ModelPtr model, const CurvePoint& p1, const CurvePoint& p2, const CurvePoint& q1,
                                   const CurvePoint& q2) {
  detail::require_genus(*model, 4, SystemKind::g4_pairs);
  detail::require_distinct({p1, p2, q1, q2});
  detail::require_not_j_equivalent(p1, p2, "P1, P2");
  detail::require_not_j_equivalent(q1, q2, "Q1, Q2");
  const auto img = detail::images(*model, {p1, p2, q1, q2});
  return detail::assemble(std::move(model), SystemKind::g4_pairs, img, std::nullopt);
}

/// The three equations above plus theta(u - u(R1 + R2) + K) = 0: u(X) and
/// the eight points u(P_j + Q_k + R_s).
inline ThetaSystem system_g4_quad(ModelPtr model, const CurvePoint& p1, const CurvePoint& p2, const CurvePoint& q1,
                                  const CurvePoint& q2, const CurvePoint& r1, const CurvePoint& r2) {
  detail::require_genus(*model, 4, SystemKind::g4_quad);
  detail::require_distinct({p1, p2, q1, q2, r1, r2});
  detail::require_not_j_equivalent(p1, p2, "P1, P2");
  detail::require_not_j_equivalent(q1, q2, "Q1, Q2");
  detail::require_not_j_equivalent(r1, r2, "R1, R2");
  const auto img = detail::images(*model, {p1, p2, q1, q2, r1, r2});
  return detail::assemble(std::move(model), SystemKind::g4_quad, img, std::nullopt);
}

/// The same systems with Weierstrass points P_s (1-based indices) as
/// auxiliary points. Their images are half periods read from the table, so
/// no integration is involved and every shift has an integer characteristic.
inline ThetaSystem weierstrass_system(ModelPtr model, SystemKind kind, const std::vector<int>& indices) {
  const int g = model->genus();
  std::size_t need = 0;
  switch (kind) {
    case SystemKind::g3_pair: need = 2; detail::require_genus(*model, 3, kind); break;
    case SystemKind::g3_triple: need = 3; detail::require_genus(*model, 3, kind); break;
    case SystemKind::g4_pairs: need = 4; detail::require_genus(*model, 4, kind); break;
    case SystemKind::g4_quad: need = 6; detail::require_genus(*model, 4, kind); break;
    case SystemKind::custom: fail(ErrorCode::InputError, "custom systems have no Weierstrass form");
  }
  if (indices.size() != need)
    fail(ErrorCode::InputError, std::string(to_string(kind)) + " needs " + std::to_string(need) + " Weierstrass indices");
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = i + 1; j < indices.size(); ++j)
      if (indices[i] == indices[j]) fail(ErrorCode::CoincidentPoints, "repeated Weierstrass index " + std::to_string(indices[i]));
  std::vector<CVector> img;
  std::vector<ThetaChar> chars;
  for (int s : indices) {
    chars.push_back(weierstrass_char(s, g));
    img.push_back(from_char(chars.back(), model->period_matrix()));
  }
  return detail::assemble(std::move(model), kind, img, chars);
}

/// |theta(u - s_k + K)| exp(-pi y^T Y^{-1} y) / scale with y = Im of the
/// argument. The factor makes each entry invariant under lattice shifts of u.
inline RVector residuals(const ThetaSystem& sys, const CVector& u) {
  const Model& m = *sys.model;
  RVector r(static_cast<Eigen::Index>(sys.size()));
  for (std::size_t k = 0; k < sys.size(); ++k)
    r(static_cast<Eigen::Index>(k)) = m.theta.normalized_abs(u - sys.shifts[k] + m.K()) / m.scale;
  return r;
}

inline double max_residual(const ThetaSystem& sys, const CVector& u) { return residuals(sys, u).maxCoeff(); }

/// Residuals of a Weierstrass system evaluated as theta functions with the
/// integer characteristics [K] - [s_k] at u, without forming the shifts.
inline RVector residuals_via_chars(const ThetaSystem& sys, const CVector& u) {
  if (!sys.shift_chars) fail(ErrorCode::InputError, "system shifts have no integer characteristics");
  const Model& m = *sys.model;
  RVector r(static_cast<Eigen::Index>(sys.size()));
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const ThetaChar& s = (*sys.shift_chars)[k];
    const ThetaChar c{m.riemann.characteristic.eps - s.eps, m.riemann.characteristic.eps_prime - s.eps_prime};
    const auto [log_prefactor, z] = m.theta.char_shift(c, u);
    const cd v = m.theta.with_char(c, u);
    r(static_cast<Eigen::Index>(k)) = std::abs(v) * std::exp(-log_prefactor.real() - m.theta.log_scale(z)) / m.scale;
  }
  return r;
}

struct CorrectorOptions {
  int max_iterations = 40;
  double target = 1e-13;     // stop once the scaled residual is below this
  double accept = 1e-9;      // converged if the final residual is below this
  double rank_threshold = 1e-6;
};

struct CorrectorResult {
  CVector u;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Equations theta(u - s_k + K + lambda_k) c_k with lattice vectors
/// lambda_k and constants c_k frozen at the start point, so the system is
/// holomorphic and well scaled near it.
class FrozenSystem {
 public:
  FrozenSystem(const ThetaSystem& sys, const CVector& u0) : sys_(sys) {
    const Model& m = *sys.model;
    for (const auto& s : sys.shifts) {
      const CVector z0 = u0 - s + m.K();
      const CVector lambda = reduce(z0, m.period_matrix()) - z0;
      offsets_.push_back(-s + m.K() + lambda);
      log_c_.push_back(-m.theta.log_scale(z0 + lambda));
    }
  }

  void evaluate(const CVector& u, CVector& f, CMatrix& jac) const {
    const Model& m = *sys_.model;
    const int g = m.genus();
    const auto n = static_cast<Eigen::Index>(offsets_.size());
    f.resize(n);
    jac.resize(n, g);
    for (Eigen::Index k = 0; k < n; ++k) {
      cd v;
      CVector grad;
      m.theta.value_and_gradient(u + offsets_[k], v, grad);
      const double c = std::exp(log_c_[k]) / m.scale;
      f(k) = c * v;
      jac.row(k) = c * grad.transpose();
    }
  }

 private:
  const ThetaSystem& sys_;
  std::vector<CVector> offsets_;
  std::vector<double> log_c_;
};

inline RMatrix realify(const CMatrix& jac) {
  const auto m = jac.rows(), g = jac.cols();
  RMatrix r(2 * m, 2 * g);
  r.topLeftCorner(m, g) = jac.real();
  r.topRightCorner(m, g) = -jac.imag();
  r.bottomLeftCorner(m, g) = jac.imag();
  r.bottomRightCorner(m, g) = jac.real();
  return r;
}

inline RVector realify(const CVector& f) {
  RVector r(2 * f.size());
  r << f.real(), f.imag();
  return r;
}

}  // namespace detail

/// Gauss-Newton on the 2m real equations in 2g real unknowns with
/// minimum-norm steps; from a point near a solution curve the iterates move
/// orthogonally onto it.
inline CorrectorResult correct(const ThetaSystem& sys, const CVector& u0, const CorrectorOptions& opt = {}) {
  const int g = sys.genus();
  const detail::FrozenSystem fs(sys, u0);
  CorrectorResult out;
  out.u = u0;
  CVector f;
  CMatrix jac;
  fs.evaluate(out.u, f, jac);
  double fnorm = f.norm();
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it;
    if (max_residual(sys, out.u) < opt.target) break;
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod;
    cod.setThreshold(opt.rank_threshold);
    cod.compute(detail::realify(jac));
    const RVector step = cod.solve(-detail::realify(f));
    CVector du(g);
    for (int i = 0; i < g; ++i) du(i) = cd(step(i), step(g + i));
    bool improved = false;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      const CVector trial = out.u + t * du;
      CVector ft;
      CMatrix jt;
      fs.evaluate(trial, ft, jt);
      if (ft.norm() < fnorm) {
        out.u = trial;
        f = std::move(ft);
        jac = std::move(jt);
        fnorm = f.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
    if (du.norm() < 1e-15 * (1.0 + out.u.norm())) break;
  }
  out.residual = max_residual(sys, out.u);
  out.converged = out.residual < opt.accept;
  return out;
}

struct TangentInfo {
  CVector tangent;         // unit vector, right singular vector of the smallest singular value
  RVector singular_values; // descending, padded with zeros to length g
  bool degenerate = false; // two smallest singular values within a factor 10
};

inline TangentInfo tangent_at(const ThetaSystem& sys, const CVector& u) {
  const int g = sys.genus();
  const detail::FrozenSystem fs(sys, u);
  CVector f;
  CMatrix jac;
  fs.evaluate(u, f, jac);
  Eigen::JacobiSVD<CMatrix> svd(jac, Eigen::ComputeFullV);
  TangentInfo t;
  t.singular_values = RVector::Zero(g);
  t.singular_values.head(svd.singularValues().size()) = svd.singularValues();
  t.tangent = svd.matrixV().col(g - 1);
  if (g >= 2) t.degenerate = t.singular_values(g - 2) <= 10.0 * t.singular_values(g - 1);
  return t;
}

struct Projection {
  cd x;
  double spread = 0.0;  // max_k |v_{k+1} - x v_k| / (max(1, |x|) max|v|)
};

/// x-coordinate of the curve point whose tangent direction in the Jacobian
/// is `tangent`: du is proportional to C (1, x, ..., x^{g-1}), so
/// v = C^{-1} tangent is proportional to the moment vector of x.
inline Projection project_to_x(const PeriodData& pd, const CVector& tangent, double tol = 1e-6) {
  const auto g = tangent.size();
  if (g < 2) fail(ErrorCode::InputError, "x-projection needs genus at least 2");
  if (tangent.norm() == 0.0) fail(ErrorCode::InputError, "tangent must be nonzero");
  const CVector v = pd.raw_a.transpose() * tangent;
  Projection p;
  p.x = std::abs(v(0)) >= std::abs(v(g - 1)) ? v(1) / v(0) : v(g - 1) / v(g - 2);
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k + 1 < g; ++k)
    p.spread = std::max(p.spread, std::abs(v(k + 1) - p.x * v(k)) / (std::max(1.0, std::abs(p.x)) * vmax));
  if (p.spread > tol)
    fail(ErrorCode::ProjectionInconsistent, "tangent is not proportional to a moment vector (spread " + std::to_string(p.spread) + ")");
  return p;
}

/// System whose solution set is u(X) alone, assembled from Weierstrass
/// systems with disjoint isolated points. Used as a membership test.
inline ThetaSystem curve_system(ModelPtr model) {
  const int g = model->genus();
  std::vector<ThetaSystem> parts;
  if (g == 3) {
    parts.push_back(weierstrass_system(model, SystemKind::g3_triple, {1, 3, 5}));
    parts.push_back(weierstrass_system(model, SystemKind::g3_triple, {2, 4, 6}));
  } else if (g == 4) {
    parts.push_back(weierstrass_system(model, SystemKind::g4_quad, {1, 2, 3, 4, 5, 6}));
    parts.push_back(weierstrass_system(model, SystemKind::g4_quad, {7, 8, 9, 10, 1, 3}));
  } else {
    fail(ErrorCode::GenusMismatch, "curve systems exist for genus 3 and 4");
  }
  ThetaSystem sys;
  sys.model = std::move(model);
  sys.kind = SystemKind::custom;
  sys.components.push_back({Component::Kind::curve_image, "X", CVector::Zero(g)});
  for (const auto& part : parts) {
    for (std::size_t k = 0; k < part.size(); ++k) {
      if (g == 4 && !sys.shifts.empty() && k == 0) continue;  // theta(u + K) appears in both
      sys.shifts.push_back(part.shifts[k]);
    }
    for (const auto& c : part.components)
      if (c.kind == Component::Kind::isolated_point) sys.components.push_back(c);
  }
  return sys;
}

enum class LabelKind { OnCurveImage, OnShiftedImage, IsolatedPoint, NotASolution };

inline std::string_view to_string(LabelKind k) {
  switch (k) {
    case LabelKind::OnCurveImage: return "OnCurveImage";
    case LabelKind::OnShiftedImage: return "OnShiftedImage";
    case LabelKind::IsolatedPoint: return "IsolatedPoint";
    case LabelKind::NotASolution: return "NotASolution";
  }
  return "NotASolution";
}

struct ComponentLabel {
  LabelKind kind = LabelKind::NotASolution;
  std::string id;
  double distance = 0.0;
};

struct ClassifyOptions {
  double residual_tol = 1e-6;
  double distance_tol = 1e-5;
};

/// Distance from v to u(X) by Gauss-Newton projection with the curve
/// system; infinite if the projection fails or lands on one of the curve
/// system's own isolated points.
inline double distance_to_curve_image(const ThetaSystem& curve_sys, const CVector& v) {
  const CorrectorResult cr = correct(curve_sys, v);
  if (!cr.converged) return std::numeric_limits<double>::infinity();
  const CMatrix& pim = curve_sys.model->period_matrix();
  for (const auto& c : curve_sys.components)
    if (c.kind == Component::Kind::isolated_point && lattice_distance(cr.u, c.offset, pim) < 1e-3)
      return std::numeric_limits<double>::infinity();
  return (cr.u - v).norm();
}

/// Component of the predicted decomposition that contains u. Throws
/// AmbiguousClassification when u is within tolerance of two components and
/// UnexplainedSolution when it solves the system but lies on none.
inline ComponentLabel classify(const ThetaSystem& sys, const CVector& u, const ClassifyOptions& opt = {}) {
  if (max_residual(sys, u) >= opt.residual_tol) return {LabelKind::NotASolution, "", 0.0};
  const CMatrix& pim = sys.model->period_matrix();
  const ThetaSystem cs = curve_system(sys.model);
  std::vector<ComponentLabel> hits;
  for (const auto& c : sys.components) {
    double d = 0.0;
    LabelKind kind = LabelKind::IsolatedPoint;
    if (c.kind == Component::Kind::isolated_point) {
      d = lattice_distance(u, c.offset, pim);
    } else {
      kind = c.kind == Component::Kind::curve_image ? LabelKind::OnCurveImage : LabelKind::OnShiftedImage;
      d = distance_to_curve_image(cs, u - c.offset);
    }
    if (d < opt.distance_tol) hits.push_back({kind, c.id, d});
  }
  if (hits.empty()) fail(ErrorCode::UnexplainedSolution, "point solves the system but lies on no predicted component");
  if (hits.size() > 1)
    fail(ErrorCode::AmbiguousClassification, "point is within tolerance of " + hits[0].id + " and " + hits[1].id);
  return hits.front();
}

struct TraceOptions {
  double step = 0.0;        // 0: 1e-2 * ||Pi||_inf
  int n_steps = 500;
  double tol = 1e-6;        // accepted samples have scaled residual below this
  double probe = 1e-3;      // spacing of the probes used to reconstruct w
  double min_step_ratio = 1e-6;
};

struct TraceSample {
  CVector u;
  CVector tangent;
  cd x_proj;
  cd w_rec;
  double residual = 0.0;
  double ratio_spread = 0.0;
  double curve_residual = 0.0;  // |w_rec^2 - f(x_proj)| / max(1, |f(x_proj)|)
  bool flagged = false;         // accepted at the minimum step although rank degenerate
};

struct TraceResult {
  std::vector<TraceSample> samples;
  double initial_step = 0.0;
  int step_halvings = 0;
  int flagged = 0;

  double max_residual() const {
    double r = 0.0;
    for (const auto& s : samples) r = std::max(r, s.residual);
    return r;
  }
  double max_ratio_spread() const {
    double r = 0.0;
    for (const auto& s : samples) r = std::max(r, s.ratio_spread);
    return r;
  }
  double max_curve_residual() const {
    double r = 0.0;
    for (const auto& s : samples) r = std::max(r, s.curve_residual);
    return r;
  }
};

namespace detail {

/// Derivative at nodes[c] of the polynomial interpolating (nodes, values).
inline cd lagrange_derivative(const std::vector<cd>& nodes, const std::vector<cd>& values, std::size_t c) {
  cd out = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t k = 0; k < n; ++k) {
    cd d;
    if (k == c) {
      d = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) d += 1.0 / (nodes[c] - nodes[j]);
    } else {
      cd num = 1.0, den = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        den *= nodes[k] - nodes[j];
        if (j != c) num *= nodes[c] - nodes[j];
      }
      d = num / den;
    }
    out += values[k] * d;
  }
  return out;
}

inline CVector aligned(const CVector& t, const CVector& reference) {
  const cd c = reference.dot(t);
  if (std::abs(c) == 0.0) return t;
  return t * (std::conj(c) / std::abs(c));
}

inline TraceSample make_sample(const ThetaSystem& sys, const CVector& u, const CVector& tangent, double residual,
                               const TraceOptions& opt) {
  const Model& m = *sys.model;
  TraceSample s;
  s.u = u;
  s.tangent = tangent;
  s.residual = residual;
  const Projection p = project_to_x(m.periods, tangent, std::numeric_limits<double>::infinity());
  s.x_proj = p.x;
  s.ratio_spread = p.spread;
  // Along the curve (C^{-1} du)_k = x^{k-1} dx / w. Near x = 0 x is an
  // analytic function of v_1 and w = dx / dv_1; for |x| > 1 the pair
  // (1 / x, v_g) is used instead and w = -x^{g+1} d(1/x) / dv_g. The
  // derivative comes from interpolation through corrected probes.
  const int g = m.genus();
  const bool far = std::abs(s.x_proj) > 1.0;
  const Eigen::Index comp = far ? g - 1 : 0;
  const auto coord = [&](cd x) { return far ? 1.0 / x : x; };
  std::vector<cd> nodes, values;
  for (int k = -2; k <= 2; ++k) {
    const CVector at = k == 0 ? u : correct(sys, u + (k * opt.probe) * tangent).u;
    const cd x = k == 0 ? s.x_proj
                        : project_to_x(m.periods, aligned(tangent_at(sys, at).tangent, tangent),
                                       std::numeric_limits<double>::infinity()).x;
    nodes.push_back((m.periods.raw_a.transpose() * at)(comp));
    values.push_back(coord(x));
  }
  const cd d = lagrange_derivative(nodes, values, 2);
  s.w_rec = far ? -std::pow(s.x_proj, g + 1) * d : d;
  const cd fx = m.curve.f(s.x_proj);
  s.curve_residual = std::abs(s.w_rec * s.w_rec - fx) / std::max(1.0, std::abs(fx));
  return s;
}

}  // namespace detail

/// Predictor-corrector continuation along a one-dimensional solution
/// component through `seed`. Consecutive tangents are phase aligned, so
/// the samples follow a real path on the curve.
inline TraceResult trace(const ThetaSystem& sys, const CVector& seed, const TraceOptions& opt = {}) {
  const double h0 = opt.step > 0.0 ? opt.step : 1e-2 * sup_norm(sys.model->period_matrix());
  TraceResult out;
  out.initial_step = h0;
  CorrectorResult start = correct(sys, seed);
  if (!(start.residual < opt.tol)) fail(ErrorCode::CorrectorDiverged, "seed is not a solution of the system");
  CVector u = start.u;
  CVector t = tangent_at(sys, u).tangent;
  out.samples.push_back(detail::make_sample(sys, u, t, start.residual, opt));
  double h = h0;
  int clean = 0;
  while (static_cast<int>(out.samples.size()) < opt.n_steps + 1) {
    const CVector pred = u + h * t;
    const CorrectorResult cr = correct(sys, pred);
    bool ok = cr.converged && cr.residual < opt.tol && (cr.u - pred).norm() < 0.5 * h;
    TangentInfo ti;
    CVector tn;
    if (ok) {
      ti = tangent_at(sys, cr.u);
      tn = detail::aligned(ti.tangent, t);
      ok = std::real(t.dot(tn)) > 0.8 && std::real(t.dot(cr.u - u)) > 0.0;
    }
    const bool at_floor = h <= h0 * opt.min_step_ratio * 2.0;
    if (ok && ti.degenerate && !at_floor) ok = false;
    if (!ok) {
      h *= 0.5;
      clean = 0;
      ++out.step_halvings;
      if (h < h0 * opt.min_step_ratio) fail(ErrorCode::CorrectorDiverged, "step size fell below the minimum");
      continue;
    }
    u = cr.u;
    t = tn;
    TraceSample s = detail::make_sample(sys, u, t, cr.residual, opt);
    if (ti.degenerate) {
      s.flagged = true;
      ++out.flagged;
    }
    out.samples.push_back(std::move(s));
    if (++clean >= 5) {
      h = std::min(2.0 * h, h0);
      clean = 0;
    }
  }
  return out;
}

inline TraceResult trace(const ThetaSystem& sys, const CVector& seed, double step, int n_steps) {
  TraceOptions opt;
  opt.step = step;
  opt.n_steps = n_steps;
  return trace(sys, seed, opt);
}

}  // namespace hyperjac
