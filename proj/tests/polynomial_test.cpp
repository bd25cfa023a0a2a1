#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "koopman/polynomial.hpp"
#include "test_models.hpp"

namespace koopman {
namespace {

TEST(Polynomial, ZeroCoefficientsAreNotStored) {
  Polynomial p(2);
  p.add_term({1, 0}, 2.0);
  p.add_term({1, 0}, -2.0);
  EXPECT_TRUE(p.terms().empty());
  EXPECT_EQ(p, Polynomial(2));
  EXPECT_EQ(Polynomial::monomial({3, 1}, 0.0).terms().size(), 0u);
}

TEST(Polynomial, CoefficientAndDegree) {
  const Polynomial p = Polynomial::monomial({2, 1}, -3.0) + Polynomial::constant(2, 4.0);
  EXPECT_EQ(p.coefficient({2, 1}), -3.0);
  EXPECT_EQ(p.coefficient({0, 0}), 4.0);
  EXPECT_EQ(p.coefficient({1, 1}), 0.0);
  EXPECT_EQ(p.degree(), 3u);
}

TEST(Polynomial, Evaluate) {
  // 2 x y^2 - x + 1 at (3, -2)
  Polynomial p = Polynomial::monomial({1, 2}, 2.0) - Polynomial::coordinate(2, 0) +
                 Polynomial::constant(2, 1.0);
  const double x[] = {3.0, -2.0};
  EXPECT_DOUBLE_EQ(p.evaluate(x), 22.0);
}

TEST(Polynomial, Product) {
  const Polynomial x = Polynomial::coordinate(1, 0);
  const Polynomial one = Polynomial::constant(1, 1.0);
  const Polynomial sq = (x + one) * (x + one);
  EXPECT_EQ(sq.coefficient({2}), 1.0);
  EXPECT_EQ(sq.coefficient({1}), 2.0);
  EXPECT_EQ(sq.coefficient({0}), 1.0);
  EXPECT_EQ(pow(x + one, 3).coefficient({1}), 3.0);
  EXPECT_EQ(pow(x, 0), one);
}

TEST(Polynomial, DimensionMismatchThrows) {
  EXPECT_THROW(Polynomial::coordinate(1, 0) + Polynomial::coordinate(2, 0), DimensionError);
  Polynomial p(2);
  EXPECT_THROW(p.add_term({1}, 1.0), DimensionError);
}

TEST(Polynomial, ShiftExpandsBinomially) {
  // (x + 1)^2 y at shift (1, 0) of x^2 y
  const Polynomial p = Polynomial::monomial({2, 1});
  const double c[] = {1.0, 0.0};
  const Polynomial s = substitute_shift(p, c);
  EXPECT_EQ(s.coefficient({2, 1}), 1.0);
  EXPECT_EQ(s.coefficient({1, 1}), 2.0);
  EXPECT_EQ(s.coefficient({0, 1}), 1.0);
  EXPECT_EQ(s.terms().size(), 3u);
}

TEST(Polynomial, ShiftRoundTripAndPointwise) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = testing::random_polynomial(2, 4, rng);
    const double c[] = {u(rng), u(rng)};
    const double minus_c[] = {-c[0], -c[1]};
    const Polynomial s = substitute_shift(p, c);
    EXPECT_LT(max_abs_difference(substitute_shift(s, minus_c), p), 1e-12);
    const double x[] = {u(rng), u(rng)};
    const double xc[] = {x[0] + c[0], x[1] + c[1]};
    EXPECT_NEAR(s.evaluate(x), p.evaluate(xc), 1e-11);
  }
  const double zero[] = {0.0, 0.0};
  const Polynomial p = Polynomial::monomial({3, 2}, 1.5);
  EXPECT_EQ(substitute_shift(p, zero), p);
}

}  // namespace
}  // namespace koopman
