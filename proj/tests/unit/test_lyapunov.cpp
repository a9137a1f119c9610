#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ineqcert/error.hpp"
#include "ineqcert/lyapunov.hpp"

using namespace ineqcert;

namespace {

const double kOrigin[3] = {0.0, 0.0, 0.0};

AuditDomain domain(double inner, double outer) {
  AuditDomain d;
  d.inner = inner;
  d.outer = outer;
  return d;
}

std::span<const double> origin(int d) { return {kOrigin, static_cast<std::size_t>(d)}; }

}  // namespace

TEST(Lyapunov, GaussianQuadraticDriftHasConstantQuantity) {
  // U = x^2/4: L U + |U'|^2 + x^2/4 = 1/2 identically.
  const auto v = parse("x1^2/2", 1);
  const auto cert = check_quadratic_drift(v, LyapunovFamily::exp_a_dist2(0.25), 0.25, origin(1), domain(0, 6));
  ASSERT_TRUE(cert.certified);
  EXPECT_NEAR(cert.param("b"), 0.5, 1e-8);
  EXPECT_GE(cert.param("b"), 0.5);
}

TEST(Lyapunov, GaussianQuadraticDriftFailsWhenGrowing) {
  // 4a^2 - 2a + c > 0 leaves a growing x^2 term.
  const auto v = parse("x1^2/2", 1);
  const auto cert = check_quadratic_drift(v, LyapunovFamily::exp_a_dist2(0.3), 0.25, origin(1), domain(0, 6));
  EXPECT_FALSE(cert.certified);
  EXPECT_TRUE(cert.witness.has_value());
}

TEST(Lyapunov, ExpAvRejectsParameterOutsideUnitInterval) {
  const auto v = parse("x1^2/2", 1);
  EXPECT_THROW(check_quadratic_drift(v, LyapunovFamily::exp_av(1.5), 0.1, origin(1), domain(0, 6)), ParameterError);
  EXPECT_THROW(check_quadratic_drift(v, LyapunovFamily::exp_av(0.0), 0.1, origin(1), domain(0, 6)), ParameterError);
  EXPECT_TRUE(check_quadratic_drift(v, LyapunovFamily::exp_av(0.5), 0.2, origin(1), domain(0, 6)).certified);
}

TEST(Lyapunov, GeneratorIdentityForExponentialTestFunction) {
  // L W / W = L U + |grad U|^2 for W = exp(U); check against finite differences of W.
  const auto v = parse("x1^4/4 + x1*x2 + x2^2", 2);
  const auto fam = LyapunovFamily::exp_a_dist2(0.3);
  const double x[2] = {0.7, -0.4};
  auto W = [&](double a, double b) { return std::exp(0.3 * (a * a + b * b)); };
  const double h = 1e-4;
  const double lap = (W(x[0] + h, x[1]) + W(x[0] - h, x[1]) + W(x[0], x[1] + h) + W(x[0], x[1] - h) - 4 * W(x[0], x[1])) /
                     (h * h);
  const auto j = v.jet(x);
  const double gw0 = (W(x[0] + h, x[1]) - W(x[0] - h, x[1])) / (2 * h);
  const double gw1 = (W(x[0], x[1] + h) - W(x[0], x[1] - h)) / (2 * h);
  const double LW = lap - j.gradient[0] * gw0 - j.gradient[1] * gw1;
  EXPECT_NEAR(generator_ratio(v, fam, x, origin(2)), LW / W(x[0], x[1]), 1e-5);
}

TEST(Lyapunov, SetDriftFromQuadratic) {
  const auto v = parse("x1^2/2", 1);
  const auto fam = LyapunovFamily::exp_a_dist2(0.25);
  const auto quad = check_quadratic_drift(v, fam, 0.25, origin(1), domain(0, 6));
  const auto set = set_drift_from_quadratic(v, fam, quad, 1.0);
  EXPECT_TRUE(set.certified);
  EXPECT_NEAR(set.param("R"), std::sqrt((0.5 + 1.0) / 0.25), 1e-6);
}

TEST(Lyapunov, RadialConditionOnAnisotropicQuadratic) {
  // x . grad V = 2 r^2 g(theta) >= 2 r^2.
  const auto v = parse("r^2*(2+sin(k*theta))", 2, {{"k", 4.0}});
  const auto cert = check_radial(v, PowerLaw{2.0, 2.0}, 0.0, origin(2), domain(1, 4));
  ASSERT_TRUE(cert.certified);
  EXPECT_GE(cert.param("c"), 2.0 - 1e-9);
}

TEST(Lyapunov, QuadraticDriftOnAnisotropicQuadraticAnnulus) {
  const auto v = parse("r^2*(2+sin(k*theta))", 2, {{"k", 4.0}});
  const auto cert = check_quadratic_drift(v, LyapunovFamily::exp_a_dist2(0.5), 1.0, origin(2), domain(1, 4));
  EXPECT_TRUE(cert.certified);
}

TEST(Lyapunov, CurvatureOfAnisotropicQuadratic) {
  // Hess V has eigenvalues 6 and 6 - k^2 on sin(k theta) = 1 rays, so K <= 6 - k^2/2.
  const auto v = parse("r^2*(2+sin(k*theta))", 2, {{"k", 4.0}});
  const auto cb = curvature_bound(v, origin(2), domain(1, 4));
  EXPECT_LE(cb.K, -2.0);
  EXPECT_NEAR(cb.K, -10.0, 1e-3);
  const double t = std::numbers::pi / 8;
  const double dir[2] = {std::cos(t), std::sin(t)};
  for (const auto& p : directional_curvature(v, origin(2), dir, {1.0, 2.0, 3.0})) {
    EXPECT_NEAR(p.min_eigenvalue, -10.0, 1e-9);
    EXPECT_LE(p.min_eigenvalue, p.half_laplacian);
  }
}

TEST(Lyapunov, KusuokaStroockGaussian) {
  const auto v = parse("x1^2/2", 1);
  const auto cert = check_kusuoka_stroock(v, 0.5, origin(1), domain(0, 6));
  ASSERT_TRUE(cert.certified);
  EXPECT_GT(cert.param("c"), 0.0);
  EXPECT_LE(cert.param("c"), 0.5);
}

TEST(Lyapunov, PhiWeightedPowerLaw) {
  const auto v = parse("r^p*(2+sin(k*theta))", 2, {{"p", 3.0}, {"k", 6.0}});
  const auto audit = domain(0, 3);
  const auto phi = fit_phi(v, origin(2), audit, 1.0);
  // lambda_min = -27 r on sin(6 theta) = 1 rays.
  EXPECT_GT(phi.a1, 26.0);
  EXPECT_LT(phi.a1, 28.0);
  const auto cert = check_phi_weighted(v, LyapunovFamily::exp_a_dist2(1.0), phi, 0.05, origin(2), audit);
  EXPECT_TRUE(cert.certified);
  PhiFunction small = phi;
  small.a1 = 20.0;
  EXPECT_FALSE(check_phi_weighted(v, LyapunovFamily::exp_a_dist2(1.0), small, 0.05, origin(2), audit).certified);
}

TEST(Lyapunov, PowerLawCurvatureAlongWorstRays) {
  const double p = 3.0;
  for (double k : {6.0, 10.0}) {
    const auto v = parse("r^p*(2+sin(k*theta))", 2, {{"p", p}, {"k", k}});
    const double t = std::numbers::pi / (2 * k);
    const double dir[2] = {std::cos(t), std::sin(t)};
    for (const auto& s : directional_curvature(v, origin(2), dir, {0.5, 1.0, 2.0, 3.0})) {
      const double bound = -0.5 * (k * k - 3 * p * p) * std::pow(s.radius, p - 2);
      EXPECT_LE(s.min_eigenvalue, 0.95 * bound);
      EXPECT_NEAR(s.half_laplacian, bound, 0.05 * std::abs(bound));
    }
  }
}

TEST(Lyapunov, InverseWeightRadialGaussian) {
  const auto v = parse("x1^2/2", 1);
  const double x[1] = {2.0};
  EXPECT_NEAR(inverse_weight_radial_sum(v, x), 4.0 / 5.0 + 3.0 / 25.0, 1e-14);
  const auto cert = check_inverse_weight_radial(v, origin(1), domain(0, 8));
  ASSERT_TRUE(cert.certified);
  EXPECT_GT(cert.param("c"), 0.0);
  EXPECT_LT(cert.param("R"), 5.0);
}

TEST(Lyapunov, WeightedGeneratorGaussian) {
  const auto v = parse("x1^2/2", 1);
  const auto cert = check_weighted_generator(v, AxisWeights::inverse_quadratic(), LyapunovFamily::exp_av(0.5), 0.0,
                                             origin(1), domain(0, 8));
  EXPECT_TRUE(cert.certified);
  EXPECT_GT(cert.param("lambda"), 0.0);
}

TEST(Lyapunov, HeavyTailFailsBothWeightedAndUnweightedChecks) {
  const auto v = parse("3*log(1+x1^2)", 1);
  EXPECT_FALSE(check_kusuoka_stroock(v, 0.5, origin(1), domain(0, 20)).certified);
  EXPECT_FALSE(check_weighted_kusuoka_stroock(v, AxisWeights::inverse_quadratic(), 0.5, origin(1), domain(0, 20))
                   .certified);
}
