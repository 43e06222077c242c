#include "support.hpp"

#include <gtest/gtest.h>

using namespace hyperjac;
using testing_support::cached_model;

namespace {

CMatrix genus2_matrix() {
  CMatrix p(2, 2);
  p << cd(0.3, 1.1), cd(-0.2, 0.4), cd(-0.2, 0.4), cd(0.1, 0.9);
  return p;
}

CVector random_u(int g, std::mt19937_64& rng, double spread = 0.8) {
  std::uniform_real_distribution<double> d(-spread, spread);
  CVector u(g);
  for (int i = 0; i < g; ++i) u(i) = cd(d(rng), d(rng));
  return u;
}

}  // namespace

TEST(Theta, GenusOneMatchesTheJacobiSeries) {
  CMatrix tau(1, 1);
  tau(0, 0) = cd(0.2, 0.8);
  const ThetaFunction th(tau);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const CVector z = random_u(1, rng);
    // theta_3(pi z | tau) = 1 + 2 sum q^{n^2} cos(2 pi n z)
    const cd q = std::exp(I * pi * tau(0, 0));
    cd series = 1.0;
    for (int n = 1; n < 40; ++n) series += 2.0 * std::pow(q, n * n) * std::cos(2.0 * pi * n * z(0));
    EXPECT_LT(std::abs(th(z) - series), 1e-12 * std::max(1.0, std::abs(series)));
  }
}

TEST(Theta, GenusTwoMatchesBoxSummation) {
  const CMatrix p = genus2_matrix();
  const ThetaFunction th(p);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const CVector u = random_u(2, rng);
    const cd ref = testing_support::theta_box(u, p, 12);
    EXPECT_LT(std::abs(th(u) - ref), 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Theta, GenusFourMatchesBoxSummation) {
  const ModelPtr m = cached_model(4, 1);
  const ThetaFunction& th = m->theta;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3; ++i) {
    const CVector u = random_u(4, rng, 0.3);
    const cd ref = testing_support::theta_box(u, m->period_matrix(), 5);
    EXPECT_LT(std::abs(th(u) - ref), 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Theta, GradientMatchesFiniteDifferences) {
  const ModelPtr m = cached_model(3, 1);
  const ThetaFunction& th = m->theta;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const CVector u = random_u(3, rng);
    const CVector grad = th.gradient(u);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-5;
      CVector up = u, dn = u;
      up(k) += h;
      dn(k) -= h;
      const cd fd = (th(up) - th(dn)) / (2.0 * h);
      EXPECT_LT(std::abs(fd - grad(k)), 1e-7 * std::max(1.0, std::abs(grad(k))));
    }
  }
}

TEST(Theta, IsEven) {
  const ModelPtr m = cached_model(3, 2);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const CVector u = random_u(3, rng);
    EXPECT_LT(std::abs(m->theta(u) - m->theta(-u)), 1e-12 * std::abs(m->theta(u)));
  }
}

TEST(Theta, QuasiPeriodicity) {
  const ModelPtr m = cached_model(3, 3);
  const CMatrix& p = m->period_matrix();
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int i = 0; i < 30; ++i) {
    const CVector u = random_u(3, rng);
    Eigen::VectorXd mv(3), mp(3);
    for (int k = 0; k < 3; ++k) {
      mv(k) = d(rng);
      mp(k) = d(rng);
    }
    const CVector mc = mv.cast<cd>();
    const cd lhs = m->theta(u + mp.cast<cd>() + p * mc);
    const cd rhs = std::exp(-I * pi * (mc.transpose() * p * mc)(0) - 2.0 * pi * I * (mc.transpose() * u)(0)) * m->theta(u);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
  }
}

TEST(Theta, ParityCounts) {
  for (auto [g, odd] : {std::pair{1, 1}, {2, 6}, {3, 28}, {4, 120}}) {
    int n_odd = 0;
    const auto all = binary_chars(g);
    for (const auto& c : all) n_odd += char_parity(c) == Parity::odd;
    EXPECT_EQ(static_cast<int>(all.size()), 1 << (2 * g));
    EXPECT_EQ(n_odd, odd) << "g=" << g;
  }
}

TEST(Theta, OddCharacteristicsVanishAtZero) {
  const ModelPtr m = cached_model(3, 1);
  const CVector zero = CVector::Zero(3);
  int even_zeros = 0;
  for (const auto& c : binary_chars(3)) {
    const double v = std::abs(m->theta.with_char(c, zero)) / m->scale;
    if (char_parity(c) == Parity::odd)
      EXPECT_LT(v, 1e-12);
    else
      even_zeros += v < 1e-8;
  }
  // a hyperelliptic genus 3 curve has exactly one vanishing even theta constant
  EXPECT_EQ(even_zeros, 1);
}

TEST(Theta, CharacteristicShiftDefinition) {
  const CMatrix p = genus2_matrix();
  const ThetaFunction th(p);
  ThetaChar c{Eigen::Vector2d(0.3, -1.2), Eigen::Vector2d(0.7, 0.4)};
  std::mt19937_64 rng(7);
  const CVector u = random_u(2, rng);
  // direct sum of exp(i pi (n + a)^T Pi (n + a) + 2 pi i (n + a)^T (u + b))
  const CVector a = 0.5 * c.eps.cast<cd>(), b = 0.5 * c.eps_prime.cast<cd>();
  cd ref = 0.0;
  for (int i = -12; i <= 12; ++i)
    for (int j = -12; j <= 12; ++j) {
      const CVector n = Eigen::Vector2cd(cd(i), cd(j)) + a;
      ref += std::exp(I * pi * (n.transpose() * p * n)(0) + 2.0 * pi * I * (n.transpose() * (u + b))(0));
    }
  EXPECT_LT(std::abs(th.with_char(c, u) - ref), 1e-11 * std::max(1.0, std::abs(ref)));
}

TEST(Theta, CharacteristicGradient) {
  const CMatrix p = genus2_matrix();
  const ThetaFunction th(p);
  const ThetaChar c{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)};
  std::mt19937_64 rng(8);
  const CVector u = random_u(2, rng);
  const CVector grad = th.with_char_gradient(c, u);
  for (int k = 0; k < 2; ++k) {
    CVector up = u, dn = u;
    up(k) += 1e-5;
    dn(k) -= 1e-5;
    EXPECT_LT(std::abs((th.with_char(c, up) - th.with_char(c, dn)) / 2e-5 - grad(k)), 1e-7 * std::max(1.0, grad.norm()));
  }
}

TEST(Theta, ErrorBoundScalesWithTheNaturalSize) {
  const ModelPtr m = cached_model(2, 1);
  CVector u = CVector::Zero(2);
  u(0) = cd(0.0, 2.0);
  EXPECT_NEAR(m->theta.error_bound(u), m->theta.tolerance() * std::exp(m->theta.log_scale(u)), 1e-30);
  EXPECT_LE(std::abs(m->theta.normalized(u)), 10.0);
}

TEST(Theta, RejectsInvalidMatrices) {
  CMatrix asym = genus2_matrix();
  asym(0, 1) += 0.5;
  EXPECT_THROW(ThetaFunction{asym}, Error);
  CMatrix indef = genus2_matrix();
  indef(1, 1) = cd(0.0, -1.0);
  try {
    ThetaFunction th(indef);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPeriodMatrix);
  }
}

TEST(Theta, ParityNeedsIntegerEntries) {
  const ThetaChar c{Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(1.0, 0.0)};
  try {
    char_parity(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegerCharacteristic);
  }
}
