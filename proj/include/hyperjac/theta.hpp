#pragma once

#include "hyperjac/core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <vector>

namespace hyperjac {

/// Characteristic [eps, eps'] of a point u = (eps' + Pi eps) / 2.
struct ThetaChar {
  RVector eps;
  RVector eps_prime;

  int genus() const { return static_cast<int>(eps.size()); }
  static ThetaChar zero(int g) { return {RVector::Zero(g), RVector::Zero(g)}; }
};

enum class Parity { even, odd };

/// Normalization of theta with characteristics: `half` uses the shift
/// (eps' + Pi eps) / 2, `full` the shift eps' + Pi eps.
enum class CharConvention { half, full };

inline bool is_integer_char(const ThetaChar& c) {
  auto integral = [](const RVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v(i) - std::round(v(i))) > 1e-12) return false;
    return true;
  };
  return integral(c.eps) && integral(c.eps_prime);
}

inline Parity char_parity(const ThetaChar& c) {
  if (!is_integer_char(c)) fail(ErrorCode::NonIntegerCharacteristic, "parity needs integer entries");
  long s = 0;
  for (Eigen::Index i = 0; i < c.eps.size(); ++i)
    s += std::lround(c.eps(i)) * std::lround(c.eps_prime(i));
  return (((s % 2) + 2) % 2) == 1 ? Parity::odd : Parity::even;
}

/// All 2^{2g} binary characteristics in lexicographic order of the bit
/// string (eps_1..eps_g, eps'_1..eps'_g).
inline std::vector<ThetaChar> binary_chars(int g) {
  std::vector<ThetaChar> out;
  const int n = 2 * g;
  for (int code = 0; code < (1 << n); ++code) {
    ThetaChar c = ThetaChar::zero(g);
    for (int bit = 0; bit < n; ++bit) {
      const double v = (code >> (n - 1 - bit)) & 1;
      if (bit < g) c.eps(bit) = v;
      else c.eps_prime(bit - g) = v;
    }
    out.push_back(c);
  }
  return out;
}

namespace detail {

/// Upper incomplete gamma function for s in {1/2, 1, 3/2, 2}.
inline double upper_gamma_half_integer(int twice_s, double x) {
  const double g_half = std::sqrt(pi) * std::erfc(std::sqrt(x));
  switch (twice_s) {
    case 1: return g_half;
    case 2: return std::exp(-x);
    case 3: return 0.5 * g_half + std::sqrt(x) * std::exp(-x);
    case 4: return (1.0 + x) * std::exp(-x);
    default: break;
  }
  fail(ErrorCode::InvalidPeriodMatrix, "genus outside 1..4");
}

}  // namespace detail

/// Riemann theta function for a fixed period matrix,
///   theta(u) = sum_m exp(i pi m^T Pi m + 2 pi i m^T u),
/// summed over the lattice points inside an ellipsoid centred at
/// -(Im Pi)^{-1} Im u. The radius is chosen so the discarded Gaussian tail
/// is below tol * exp(pi y^T Y^{-1} y), with y = Im u, Y = Im Pi.
class ThetaFunction {
 public:
  explicit ThetaFunction(const CMatrix& pi_matrix, double tol = 1e-13, double radius_factor = 1.0) : tol_(tol) {
    g_ = static_cast<int>(pi_matrix.rows());
    if (g_ < 1 || g_ > 4 || pi_matrix.cols() != g_)
      fail(ErrorCode::InvalidPeriodMatrix, "period matrix must be square of size 1..4");
    const double defect = sup_norm(pi_matrix - pi_matrix.transpose()) / std::max(1.0, sup_norm(pi_matrix));
    if (defect > 1e-8) fail(ErrorCode::InvalidPeriodMatrix, "period matrix is not symmetric");
    pi_ = 0.5 * (pi_matrix + pi_matrix.transpose());
    y_ = pi_.imag();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(y_);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      fail(ErrorCode::InvalidPeriodMatrix, "imaginary part is not positive definite");
    y_inv_ = y_.inverse();
    Eigen::LLT<RMatrix> llt(pi * y_);
    t_ = llt.matrixU();

    rho_ = shortest_vector();
    radius_ = radius_factor * (choose_radius() + 0.75);
    build_offsets();
  }

  int genus() const noexcept { return g_; }
  const CMatrix& period_matrix() const noexcept { return pi_; }
  const RMatrix& imag_part() const noexcept { return y_; }
  const RMatrix& imag_inverse() const noexcept { return y_inv_; }
  double tolerance() const noexcept { return tol_; }
  double radius() const noexcept { return radius_; }
  double shortest_lattice_vector() const noexcept { return rho_; }
  std::size_t lattice_size() const noexcept { return offsets_.size() / static_cast<std::size_t>(g_); }

  /// pi y^T Y^{-1} y: log of the natural size of theta at u.
  double log_scale(const CVector& u) const {
    const RVector y = u.imag();
    return pi * y.dot(y_inv_ * y);
  }

  /// Bound on the truncation error of value(u).
  double error_bound(const CVector& u) const { return tol_ * std::exp(log_scale(u)); }

  /// theta(u) * exp(-pi y^T Y^{-1} y); invariant in modulus under lattice shifts.
  cd normalized(const CVector& u) const {
    cd v;
    sum(u, &v, nullptr);
    return v;
  }

  double normalized_abs(const CVector& u) const { return std::abs(normalized(u)); }

  cd value(const CVector& u) const { return normalized(u) * std::exp(log_scale(u)); }
  cd operator()(const CVector& u) const { return value(u); }

  CVector gradient(const CVector& u) const {
    CVector grad;
    sum(u, nullptr, &grad);
    return grad * std::exp(log_scale(u));
  }

  void value_and_gradient(const CVector& u, cd& value, CVector& grad) const {
    sum(u, &value, &grad);
    const double s = std::exp(log_scale(u));
    value *= s;
    grad *= s;
  }

  /// theta[eps, eps'](u) = exp(i pi (eps/2)^T Pi (eps/2) + 2 pi i (eps/2)^T (u + eps'/2))
  ///                       * theta(u + eps'/2 + Pi eps/2)
  cd with_char(const ThetaChar& c, const CVector& u, CharConvention conv = CharConvention::half) const {
    const auto [log_prefactor, z] = char_shift(c, u, conv);
    return std::exp(log_prefactor) * value(z);
  }

  CVector with_char_gradient(const ThetaChar& c, const CVector& u, CharConvention conv = CharConvention::half) const {
    const auto [log_prefactor, z] = char_shift(c, u, conv);
    cd v;
    CVector grad;
    value_and_gradient(z, v, grad);
    const CVector a = char_factor(conv) * c.eps.cast<cd>();
    return std::exp(log_prefactor) * (grad + 2.0 * pi * I * a * v);
  }

  /// Exponent of the prefactor and the shifted argument z with
  /// theta[c](u) = exp(log_prefactor) * theta(z).
  std::pair<cd, CVector> char_shift(const ThetaChar& c, const CVector& u, CharConvention conv = CharConvention::half) const {
    if (c.eps.size() != g_ || c.eps_prime.size() != g_)
      fail(ErrorCode::InputError, "characteristic has the wrong length");
    const double f = char_factor(conv);
    const CVector a = f * c.eps.cast<cd>();
    const CVector b = f * c.eps_prime.cast<cd>();
    const cd q = (a.transpose() * pi_ * a)(0);
    const cd lin = a.dot(u + b);  // dot conjugates the left operand, which is real
    return {I * pi * q + 2.0 * pi * I * lin, u + b + pi_ * a};
  }

 private:
  static double char_factor(CharConvention conv) { return conv == CharConvention::half ? 0.5 : 1.0; }

  double shortest_vector() const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g_; ++i) best = std::min(best, t_.col(i).norm());
    const RMatrix gram_inv = (t_.transpose() * t_).inverse();
    std::vector<int> bound(g_);
    for (int i = 0; i < g_; ++i) bound[i] = static_cast<int>(std::ceil(best * std::sqrt(gram_inv(i, i))));
    for_each_in_box(bound, [&](const std::vector<int>& n) {
      RVector v(g_);
      bool nonzero = false;
      for (int i = 0; i < g_; ++i) {
        v(i) = n[i];
        nonzero |= n[i] != 0;
      }
      if (nonzero) best = std::min(best, (t_ * v).norm());
    });
    return best;
  }

  double choose_radius() const {
    const double lower = 0.5 * (std::sqrt(static_cast<double>(g_)) + rho_);
    auto bound = [&](double r) {
      const double x = (r - 0.5 * rho_) * (r - 0.5 * rho_);
      return 0.5 * g_ * std::pow(2.0 / rho_, g_) * detail::upper_gamma_half_integer(g_, x);
    };
    double r = lower;
    while (bound(r) > tol_ && r < 50.0) r += 0.05;
    return r;
  }

  template <class F>
  static void for_each_in_box(const std::vector<int>& bound, F&& f) {
    const std::size_t g = bound.size();
    std::vector<int> n(g);
    for (std::size_t i = 0; i < g; ++i) n[i] = -bound[i];
    while (true) {
      f(n);
      std::size_t k = 0;
      while (k < g) {
        if (++n[k] <= bound[k]) break;
        n[k] = -bound[k];
        ++k;
      }
      if (k == g) return;
    }
  }

  void build_offsets() {
    double half_span = 0.0;
    for (int i = 0; i < g_; ++i) half_span += 0.5 * t_.col(i).norm();
    const double outer = radius_ + half_span;
    const RMatrix gram_inv = (t_.transpose() * t_).inverse();
    std::vector<int> bound(g_);
    for (int i = 0; i < g_; ++i) bound[i] = static_cast<int>(std::ceil(outer * std::sqrt(gram_inv(i, i))));
    for_each_in_box(bound, [&](const std::vector<int>& n) {
      RVector v(g_);
      for (int i = 0; i < g_; ++i) v(i) = n[i];
      if ((t_ * v).norm() < outer)
        for (int i = 0; i < g_; ++i) offsets_.push_back(n[i]);
    });
  }

  void sum(const CVector& u, cd* value, CVector* grad) const {
    if (u.size() != g_) fail(ErrorCode::InputError, "argument has the wrong dimension");
    const RVector y = u.imag();
    const RVector center = -(y_inv_ * y);
    const double shift = pi * y.dot(y_inv_ * y);
    int c0[4] = {0, 0, 0, 0};
    for (int i = 0; i < g_; ++i) c0[i] = static_cast<int>(std::lround(center(i)));
    const double r2 = radius_ * radius_;
    cd acc = 0.0;
    cd acc_grad[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t count = lattice_size();
    double m[4], d[4];
    for (std::size_t p = 0; p < count; ++p) {
      const int* n = &offsets_[p * g_];
      for (int i = 0; i < g_; ++i) {
        m[i] = n[i] + c0[i];
        d[i] = m[i] - center(i);
      }
      double norm2 = 0.0;
      for (int r = 0; r < g_; ++r) {
        double s = 0.0;
        for (int c = r; c < g_; ++c) s += t_(r, c) * d[c];
        norm2 += s * s;
      }
      if (norm2 >= r2) continue;
      cd quad = 0.0, lin = 0.0;
      for (int r = 0; r < g_; ++r) {
        cd row = 0.0;
        for (int c = 0; c < g_; ++c) row += pi_(r, c) * m[c];
        quad += m[r] * row;
        lin += m[r] * u(r);
      }
      const cd term = std::exp(I * pi * quad + 2.0 * pi * I * lin - shift);
      acc += term;
      if (grad)
        for (int i = 0; i < g_; ++i) acc_grad[i] += m[i] * term;
    }
    if (value) *value = acc;
    if (grad) {
      grad->resize(g_);
      for (int i = 0; i < g_; ++i) (*grad)(i) = 2.0 * pi * I * acc_grad[i];
    }
  }

  int g_ = 0;
  double tol_;
  CMatrix pi_;
  RMatrix y_, y_inv_, t_;
  double rho_ = 0.0;
  double radius_ = 0.0;
  std::vector<int> offsets_;
};

inline cd theta(const CVector& u, const CMatrix& pi_matrix, double tol = 1e-13) {
  return ThetaFunction(pi_matrix, tol)(u);
}

inline CVector theta_grad(const CVector& u, const CMatrix& pi_matrix, double tol = 1e-13) {
  return ThetaFunction(pi_matrix, tol).gradient(u);
}

inline cd theta_char(const ThetaChar& c, const CVector& u, const CMatrix& pi_matrix, double tol = 1e-13,
                     CharConvention conv = CharConvention::half) {
  return ThetaFunction(pi_matrix, tol).with_char(c, u, conv);
}

}  // namespace hyperjac
