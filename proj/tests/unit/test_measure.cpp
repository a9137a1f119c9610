#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ineqcert/error.hpp"
#include "ineqcert/measure.hpp"

using namespace ineqcert;

namespace {

GridMeasure gaussian(int n = 512, double L = 8.0) {
  static const auto spec = parse("x1^2/2", 1);
  const double x0[1] = {0.0};
  return discretize(spec, L, n, x0);
}

std::vector<double> linear_log_density(const GridMeasure& mu, double m) {
  std::vector<double> lh(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) lh[i] = m * mu.node(i)[0];
  return lh;
}

}  // namespace

TEST(Measure, GaussianNormalizationAndMoments) {
  const auto mu = gaussian();
  double total = 0.0;
  for (double w : mu.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(mu.log_z(), 0.5 * std::log(2 * std::numbers::pi), 1e-10);
  EXPECT_NEAR(moment(mu, [](std::span<const double> x) { return x[0] * x[0]; }), 1.0, 1e-10);
  EXPECT_LT(mu.boundary_mass(), 1e-12);
  EXPECT_FALSE(mu.truncation_warning());
}

TEST(Measure, GridLayoutAxisZeroFastest) {
  const auto spec = parse("x1^2/2 + x2^2/2", 2);
  const double x0[2] = {0.0, 0.0};
  const auto mu = discretize(spec, 4.0, 8, x0);
  EXPECT_EQ(mu.size(), 64u);
  EXPECT_EQ(mu.stride(0), 1u);
  EXPECT_EQ(mu.stride(1), 8u);
  EXPECT_DOUBLE_EQ(mu.node(1)[0] - mu.node(0)[0], 1.0);
  EXPECT_DOUBLE_EQ(mu.node(8)[1] - mu.node(0)[1], 1.0);
  EXPECT_DOUBLE_EQ(mu.node(0)[0], -3.5);
}

TEST(Measure, ShiftedGaussianEntropyAndFisher) {
  // exp(m x) N(0,1) is N(m,1): H = m^2/2, I = m^2/4.
  const auto mu = gaussian();
  for (double m : {0.5, 1.0, 2.0}) {
    const auto nu = density_from_log(mu, linear_log_density(mu, m));
    EXPECT_NEAR(relative_entropy(nu, mu), m * m / 2, 1e-7);
    EXPECT_NEAR(fisher_information(nu, mu), m * m / 4, 2e-3 * m * m);
  }
}

TEST(Measure, DirichletFormOfLinearFunction) {
  const auto mu = gaussian();
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) g[i] = mu.node(i)[0];
  EXPECT_NEAR(dirichlet_form(mu, g), 1.0, 1e-3);
  EXPECT_NEAR(variance(mu, g), 1.0, 1e-10);
}

TEST(Measure, EntropyOfSquareVanishesOnConstants) {
  const auto mu = gaussian(64);
  std::vector<double> g(mu.size(), 3.0);
  EXPECT_NEAR(entropy_of_square(mu, g), 0.0, 1e-12);
}

TEST(Measure, IntegrabilityGaussianThreshold) {
  const auto mu = gaussian();
  EXPECT_FALSE(integrability_probe(mu, 0.25).divergent);
  EXPECT_NEAR(integrability_probe(mu, 0.25).value, std::sqrt(2.0), 1e-6);
  EXPECT_TRUE(integrability_probe(mu, 0.5).divergent);
  EXPECT_NEAR(locate_integrability_threshold(mu, 0.01, 2.0), 0.5, 1e-6);
}

TEST(Measure, WangProbeDivergesForAnisotropicQuadratic) {
  const auto spec = parse("r^2*(2+sin(k*theta))", 2, {{"k", 4.0}});
  const double x0[2] = {0.0, 0.0};
  const auto mu = discretize(spec, 4.5, 48, x0);
  EXPECT_TRUE(integrability_probe(mu, 1.0).divergent);
  EXPECT_FALSE(integrability_probe(mu, 0.5).divergent);
}

TEST(Measure, SuperGaussianTailHasNegligibleBoundaryMass) {
  const auto spec = parse("r^p*(2+sin(k*theta))", 2, {{"p", 3.0}, {"k", 6.0}});
  const double x0[2] = {0.0, 0.0};
  const auto mu = discretize(spec, 3.0, 256, x0);
  EXPECT_LT(mu.boundary_mass(), 1e-6);
}

TEST(Measure, RejectsBadGrids) {
  const auto spec = parse("x1^2/2", 1);
  const double x0[1] = {0.0};
  EXPECT_THROW(discretize(spec, -1.0, 16, x0), Error);
  EXPECT_THROW(discretize(spec, 1.0, 1, x0), Error);
}
