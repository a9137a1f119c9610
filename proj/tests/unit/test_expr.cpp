#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ineqcert/error.hpp"
#include "ineqcert/expr.hpp"

using namespace ineqcert;

namespace {

std::array<double, 2> polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

}  // namespace

TEST(Expr, GaussianJet) {
  const auto v = parse("x1^2/2 + x2^2/2", 2);
  const double x[2] = {0.3, -1.2};
  const auto j = v.jet(x);
  EXPECT_DOUBLE_EQ(j.value, 0.5 * (0.09 + 1.44));
  EXPECT_DOUBLE_EQ(j.gradient[0], 0.3);
  EXPECT_DOUBLE_EQ(j.gradient[1], -1.2);
  EXPECT_DOUBLE_EQ(j.hessian(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(j.hessian(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j.laplacian, 2.0);
}

TEST(Expr, ConstantsAndPrecedence) {
  const auto v = parse("-a*x1^2^1 + 2^3 - 8/4/2", 1, {{"a", 3.0}});
  const double x[1] = {2.0};
  EXPECT_DOUBLE_EQ(v.value(x), -12.0 + 8.0 - 1.0);
}

TEST(Expr, FunctionsDifferentiate) {
  const auto v = parse("exp(x1) + log(1+x1^2) + sqrt(2+x1) + cosh(x1) + tanh(x1)", 1);
  const double x[1] = {0.7};
  const double t = 0.7;
  const auto j = v.jet(x);
  const double d1 = std::exp(t) + 2 * t / (1 + t * t) + 0.5 / std::sqrt(2 + t) + std::sinh(t) +
                    1 - std::tanh(t) * std::tanh(t);
  const double th = std::tanh(t);
  const double d2 = std::exp(t) + (2 - 2 * t * t) / std::pow(1 + t * t, 2) - 0.25 * std::pow(2 + t, -1.5) +
                    std::cosh(t) - 2 * th * (1 - th * th);
  EXPECT_NEAR(j.gradient[0], d1, 1e-13);
  EXPECT_NEAR(j.hessian(0, 0), d2, 1e-12);
}

TEST(Expr, PolarLaplacianSmallK) {
  // V = r^2 (2 + sin theta): Laplacian = 4 g + g'' = 8 + 3 sin theta.
  const auto v = parse("r^2*(2+sin(k*theta))", 2, {{"k", 1.0}});
  const auto x = polar(2.0, std::numbers::pi / 2);
  EXPECT_NEAR(v.jet(x).laplacian, 11.0, 1e-10);
}

TEST(Expr, PolarLaplacianPowerLaw) {
  const double p = 3.0, k = 6.0;
  const auto v = parse("r^p*(2+sin(k*theta))", 2, {{"p", p}, {"k", k}});
  for (double r : {0.3, 1.0, 2.5})
    for (double t : {0.1, 1.0, 2.0, 4.0, 5.5}) {
      const auto x = polar(r, t);
      const double s = std::sin(k * t);
      const double expected = std::pow(r, p - 2) * (p * p * (2 + s) - k * k * s);
      EXPECT_NEAR(v.jet(x).laplacian, expected, 1e-8 * (1 + std::abs(expected)));
    }
}

TEST(Expr, HessianIsSymmetricAndMatchesFiniteDifferences) {
  const auto v = parse("x1^4 + x1*x2*x3 + sin(x2)*x3^2", 3);
  const double x[3] = {0.4, -0.3, 1.1};
  const auto j = v.jet(x);
  const double h = 1e-5;
  for (int a = 0; a < 3; ++a) {
    double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
    xp[a] += h;
    xm[a] -= h;
    const auto jp = v.jet(xp), jm = v.jet(xm);
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(j.hessian(a, b), j.hessian(b, a), 1e-14);
      EXPECT_NEAR(j.hessian(a, b), (jp.gradient[b] - jm.gradient[b]) / (2 * h), 1e-7);
    }
  }
}

TEST(Expr, ParseErrorsCarryPosition) {
  EXPECT_THROW(parse("x1 + ", 1), ParseError);
  EXPECT_THROW(parse("x1 + y", 1), ParseError);
  EXPECT_THROW(parse("x2", 1), ParseError);
  EXPECT_THROW(parse("theta", 1), ParseError);
  try {
    parse("x1 * (x1 + 2", 1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GE(e.position(), 5u);
  }
}

TEST(Expr, DomainErrors) {
  const auto v = parse("log(x1)", 1);
  const double x[1] = {-1.0};
  EXPECT_THROW(v.value(x), DomainError);
  const auto p = parse("r^2*sin(theta)", 2);
  const double o[2] = {0.0, 0.0};
  EXPECT_THROW(p.jet(o), DomainError);
}

TEST(Expr, GrowthDegree) {
  EXPECT_EQ(parse("x1^2/2", 1).growth_degree(), 2.0);
  EXPECT_EQ(parse("r^3*(2+sin(6*theta))", 2).growth_degree(), 3.0);
  EXPECT_EQ(parse("sin(x1)", 1).growth_degree(), 0.0);
}
