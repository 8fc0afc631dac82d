#include <gtest/gtest.h>

#include <random>

#include "umbilic4/field.hpp"

using umbilic4::AlgebraicScalar;
using umbilic4::Rational;

namespace {

AlgebraicScalar random_scalar(std::mt19937_64& rng, int span = 9) {
  std::uniform_int_distribution<int> num(-span, span), den(1, span);
  return AlgebraicScalar(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
                         Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
}

}  // namespace

TEST(Field, GoldenRatioIdentity) {
  AlgebraicScalar tau = (AlgebraicScalar(1) + AlgebraicScalar::sqrt5()) / AlgebraicScalar(2);
  EXPECT_EQ(tau * tau, tau + AlgebraicScalar(1));
  EXPECT_EQ(tau.inverse(), tau - AlgebraicScalar(1));
}

TEST(Field, RadicalProducts) {
  EXPECT_EQ(AlgebraicScalar::sqrt2() * AlgebraicScalar::sqrt2(), AlgebraicScalar(2));
  EXPECT_EQ(AlgebraicScalar::sqrt2() * AlgebraicScalar::sqrt5(), AlgebraicScalar::sqrt10());
  EXPECT_EQ(AlgebraicScalar::sqrt10() * AlgebraicScalar::sqrt10(), AlgebraicScalar(10));
  EXPECT_EQ(AlgebraicScalar::sqrt10() * AlgebraicScalar::sqrt5(), AlgebraicScalar(0, 5));
}

TEST(Field, MatchesFloatingEmbedding) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_scalar(rng), b = random_scalar(rng);
    double fa = a.to_double(), fb = b.to_double();
    EXPECT_NEAR((a * b).to_double(), fa * fb, 1e-9 * (1 + std::abs(fa * fb)));
    EXPECT_NEAR((a + b).to_double(), fa + fb, 1e-12 * (1 + std::abs(fa) + std::abs(fb)));
    if (!b.is_zero()) {
      EXPECT_EQ((a / b) * b, a);
      EXPECT_NEAR((a / b).to_double(), fa / fb, 1e-8 * (1 + std::abs(fa / fb)));
    }
  }
}

TEST(Field, SignAgreesWithFloatAwayFromZero) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = random_scalar(rng);
    double f = a.to_double();
    if (std::abs(f) > std::ldexp(1.0, -30)) EXPECT_EQ(a.sign(), f > 0 ? 1 : -1);
  }
}

TEST(Field, SignOfNearCancellation) {
  // 99 - 70√2 ≈ 0.00505 > 0, while 70√2 - 99 < 0
  AlgebraicScalar x(99, -70);
  EXPECT_EQ(x.sign(), 1);
  EXPECT_EQ((-x).sign(), -1);
  // 161 - 72√5 ≈ 0.0031 > 0
  EXPECT_EQ(AlgebraicScalar(161, 0, -72).sign(), 1);
  EXPECT_EQ(AlgebraicScalar(0).sign(), 0);
}

TEST(Field, StringRoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_scalar(rng);
    EXPECT_EQ(AlgebraicScalar::parse(a.to_string()), a) << a.to_string();
  }
  EXPECT_EQ(AlgebraicScalar(0).to_string(), "0");
  EXPECT_EQ(AlgebraicScalar(Rational(1, 2), 0, Rational(-3, 4)).to_string(), "1/2-3/4*sqrt5");
  EXPECT_EQ(AlgebraicScalar::parse("2*sqrt5"), AlgebraicScalar(0, 0, 2));
  EXPECT_EQ(AlgebraicScalar::parse("-sqrt10"), -AlgebraicScalar::sqrt10());
  EXPECT_THROW(AlgebraicScalar::parse("sqrt3"), std::invalid_argument);
}

TEST(Field, DivisionByZeroThrows) {
  EXPECT_THROW(AlgebraicScalar(1) / AlgebraicScalar(0), std::domain_error);
}

TEST(Field, Conj5IsInvolutiveAutomorphism) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_scalar(rng), b = random_scalar(rng);
    EXPECT_EQ(a.conj5().conj5(), a);
    EXPECT_EQ((a * b).conj5(), a.conj5() * b.conj5());
  }
}
