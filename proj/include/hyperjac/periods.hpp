#pragma once

#include "hyperjac/path.hpp"

#include <Eigen/SVD>

#include <vector>

namespace hyperjac {

enum class CycleKind { a, b };

/// A homology cycle collapsed onto branch-to-branch segments. Each piece is
/// traversed on the reference sheet w1 (for a cut, its left edge) and
/// counted with the given weight; the collapsed a- and b-cycles use weight 2.
struct CycleSpec {
  struct Piece {
    int from;  // 0-based branch index
    int to;
    int weight;
  };
  CycleKind kind = CycleKind::a;
  int index = 1;  // 1-based, as in a_j / b_j
  int orientation = 1;
  std::vector<Piece> pieces;

  /// Branch points enclosed by the thin loop realizing the cycle (0-based).
  std::vector<int> enclosed() const {
    std::vector<int> out;
    const int lo = pieces.front().from;
    const int hi = pieces.back().to;
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
};

/// a_j loops around the cut {x_{2j-1}, x_{2j}}; b_j runs from cut j to the
/// last cut {x_{2g+1}, x_{2g+2}} and back on the other sheet. Its collapsed
/// form is twice the sum over the gaps [x_{2k}, x_{2k+1}], k = j..g.
inline CycleSpec cycle(const Curve& curve, CycleKind kind, int j) {
  const int g = curve.genus();
  if (j < 1 || j > g) fail(ErrorCode::IndexOutOfRange, "cycle index " + std::to_string(j) + " outside 1.." + std::to_string(g));
  CycleSpec c;
  c.kind = kind;
  c.index = j;
  if (kind == CycleKind::a) {
    c.pieces.push_back({2 * j - 2, 2 * j - 1, 2});
  } else {
    for (int k = j; k <= g; ++k) c.pieces.push_back({2 * k - 1, 2 * k, 2});
  }
  return c;
}

/// Intersection numbers mod 2 of two cycle realizations: the parity of the
/// number of branch points enclosed by both loops.
inline int intersection_mod2(const CycleSpec& c1, const CycleSpec& c2) {
  int common = 0;
  for (int p : c1.enclosed())
    for (int q : c2.enclosed()) common += (p == q);
  return common % 2;
}

namespace detail {

inline LiftedSegment piece_segment(const Curve& curve, const CycleSpec::Piece& piece) {
  LiftedSegment seg(curve, curve.branch(piece.from), curve.branch(piece.to), piece.from, piece.to);
  // match the reference sheet just left of the midpoint
  const double t = 0.5;
  if (sheet_label(curve, seg, t) < 0) seg.flip();
  return seg;
}

inline auto monomials(int g) {
  return [g](cd x, cd) {
    CVector v(g);
    cd p = 1.0;
    for (int s = 0; s < g; ++s) {
      v(s) = p;
      p *= x;
    }
    return v;
  };
}

}  // namespace detail

/// Vector of integrals of x^s dx / w, s = 0..g-1, over the cycle.
inline CVector integrate_cycle_all(const Curve& curve, const CycleSpec& c, double tol) {
  const int g = curve.genus();
  CVector total = CVector::Zero(g);
  for (const auto& piece : c.pieces) {
    const LiftedSegment seg = detail::piece_segment(curve, piece);
    total += static_cast<double>(piece.weight) * seg.integrate(detail::monomials(g), g, tol / (2.0 * c.pieces.size()));
  }
  return static_cast<double>(c.orientation) * total;
}

inline cd integrate_cycle(const Curve& curve, int monomial_degree, const CycleSpec& c, double tol) {
  if (monomial_degree < 0 || monomial_degree >= curve.genus())
    fail(ErrorCode::IndexOutOfRange, "monomial degree outside 0..g-1");
  return integrate_cycle_all(curve, c, tol)(monomial_degree);
}

struct PeriodData {
  CMatrix raw_a;          // A(j, s) = integral over a_j of x^s dx / w
  CMatrix raw_b;          // B(j, s) likewise over b_j
  CMatrix normalizer;     // C with du = C (1, x, ..., x^{g-1})^T dx / w
  CMatrix period_matrix;  // Pi(j, s) = integral over b_j of du_s
  double cond_a = 0.0;
  std::vector<int> b_orientation;  // sign applied to the collapsed b_j
};

inline double symmetry_defect(const CMatrix& pi_matrix) {
  return sup_norm(pi_matrix - pi_matrix.transpose()) / std::max(1.0, sup_norm(pi_matrix));
}

inline double min_imag_eigenvalue(const CMatrix& pi_matrix) {
  const RMatrix y = 0.5 * (pi_matrix.imag() + pi_matrix.imag().transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(y);
  return es.eigenvalues().minCoeff();
}

inline PeriodData compute_periods(const Curve& curve, double tol = 1e-13) {
  if (!curve.branch_polyline_is_simple())
    fail(ErrorCode::NonSimpleBranchPolyline, "branch points in the given order must form a simple polyline");
  const int g = curve.genus();
  PeriodData pd;
  pd.raw_a.resize(g, g);
  pd.raw_b.resize(g, g);
  for (int j = 1; j <= g; ++j) {
    pd.raw_a.row(j - 1) = integrate_cycle_all(curve, cycle(curve, CycleKind::a, j), tol).transpose();
    pd.raw_b.row(j - 1) = integrate_cycle_all(curve, cycle(curve, CycleKind::b, j), tol).transpose();
  }
  Eigen::JacobiSVD<CMatrix> svd(pd.raw_a);
  const auto& sv = svd.singularValues();
  pd.cond_a = sv(0) / sv(g - 1);
  if (!(sv(g - 1) > 0.0) || pd.cond_a > 1e12)
    fail(ErrorCode::SingularPeriodMatrix, "a-period matrix is numerically rank deficient");

  const CMatrix a_inv = pd.raw_a.inverse();
  CMatrix pi_matrix = pd.raw_b * a_inv;
  // a_j . b_j = +1 is restored by flipping b_j where Im Pi_jj < 0
  pd.b_orientation.assign(static_cast<std::size_t>(g), 1);
  for (int j = 0; j < g; ++j) {
    if (pi_matrix(j, j).imag() < 0) {
      pd.b_orientation[j] = -1;
      pd.raw_b.row(j) *= -1.0;
      pi_matrix.row(j) *= -1.0;
    }
  }
  pd.normalizer = a_inv.transpose();
  pd.period_matrix = pi_matrix;
  if (symmetry_defect(pi_matrix) > 1e-8)
    fail(ErrorCode::InvalidPeriodMatrix, "period matrix is not symmetric; homology basis is not symplectic");
  if (!(min_imag_eigenvalue(pd.period_matrix) > 0.0))
    fail(ErrorCode::InvalidPeriodMatrix, "imaginary part of the period matrix is not positive definite");
  return pd;
}

/// Cycle with the orientation chosen by compute_periods.
inline CycleSpec oriented_cycle(const Curve& curve, const PeriodData& pd, CycleKind kind, int j) {
  CycleSpec c = cycle(curve, kind, j);
  if (kind == CycleKind::b) c.orientation = pd.b_orientation.at(static_cast<std::size_t>(j - 1));
  return c;
}

/// C (1, x, ..., x^{g-1})^T / w
inline CVector normalized_du_at(const Curve& curve, const PeriodData& pd, const CurvePoint& p) {
  if (std::abs(p.w) == 0.0 || curve.is_weierstrass(p))
    fail(ErrorCode::WeierstrassPoint, "normalized differentials are evaluated relative to dx and blow up at w = 0");
  return pd.normalizer * detail::monomials(curve.genus())(p.x, p.w) / p.w;
}

}  // namespace hyperjac
