#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "ineqcert/error.hpp"
#include "ineqcert/transport.hpp"

using namespace ineqcert;
using namespace ineqcert::testing;

TEST(Transport, ExactMatchesBruteForceOnSmallInstances) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const auto a = random_measure(rng, 2, 1 + t % 4);
    const auto b = random_measure(rng, 2, 1 + (t / 4) % 4);
    for (int p : {1, 2}) {
      const auto ex = wasserstein_exact(a, b, p);
      EXPECT_NEAR(ex.plan.cost, brute_force_cost(a, b, p), 1e-9);
      EXPECT_LE(std::abs(ex.duality_gap), 1e-12);
      EXPECT_GE(ex.min_reduced_cost, -1e-12);
    }
  }
}

TEST(Transport, ExactMatchesQuantileCouplingOnTheLine) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_measure(rng, 1, 40);
    const auto b = random_measure(rng, 1, 55);
    for (int p : {1, 2}) EXPECT_NEAR(wasserstein_exact(a, b, p).plan.cost, quantile_cost_1d(a, b, p), 1e-12);
  }
}

TEST(Transport, PlanHasPrescribedMarginals) {
  std::mt19937_64 rng(9);
  const auto a = random_measure(rng, 2, 30), b = random_measure(rng, 2, 20);
  const auto ex = wasserstein_exact(a, b, 2);
  const auto rs = ex.plan.row_sums(), cs = ex.plan.col_sums();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(rs[i], a.weights[i], 1e-14);
  for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(cs[j], b.weights[j], 1e-14);
  EXPECT_LE(ex.plan.entries.size(), a.size() + b.size() - 1);
}

TEST(Transport, DiracDistance) {
  const double x[2] = {0.0, 0.0}, y[2] = {3.0, 4.0};
  const auto a = DiscreteMeasure::dirac(x), b = DiscreteMeasure::dirac(y);
  EXPECT_DOUBLE_EQ(wasserstein_exact(a, b, 1).distance, 5.0);
  EXPECT_DOUBLE_EQ(wasserstein_exact(a, b, 2).distance, 5.0);
}

TEST(Transport, SinkhornBoundsExactFromAboveAndConverges) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_measure(rng, 2, 24), b = random_measure(rng, 2, 24);
    const double exact = wasserstein_exact(a, b, 2).plan.cost;
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto s = wasserstein_sinkhorn(a, b, 2, eps);
      EXPECT_GE(s.plan.cost, exact - 1e-9);
      EXPECT_LE(s.plan.cost, previous * (1 + 1e-6));
      previous = s.plan.cost;
      const auto rs = s.plan.row_sums(), cs = s.plan.col_sums();
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(rs[i], a.weights[i], 1e-12);
      for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(cs[j], b.weights[j], 1e-12);
    }
    EXPECT_LT((previous - exact) / exact, 2e-3);
  }
}

TEST(Transport, SinkhornSkipsZeroWeightAtoms) {
  DiscreteMeasure a{1, {0.0, 1.0, 2.0}, {0.5, 0.0, 0.5}};
  DiscreteMeasure b{1, {0.5, 1.5}, {0.5, 0.5}};
  const auto s = wasserstein_sinkhorn(a, b, 2, 1e-3);
  EXPECT_TRUE(std::isfinite(s.distance));
  EXPECT_NEAR(s.plan.cost, 0.25, 1e-3);
}

TEST(Transport, RejectsInvalidMeasures) {
  DiscreteMeasure a{1, {0.0, 1.0}, {0.7, 0.7}};
  DiscreteMeasure b{1, {0.0}, {1.0}};
  EXPECT_THROW(wasserstein_exact(a, b, 2), InputError);
  DiscreteMeasure c{1, {0.0, 1.0}, {1.5, -0.5}};
  EXPECT_THROW(wasserstein_exact(c, b, 2), InputError);
  EXPECT_THROW(wasserstein_sinkhorn(b, b, 2, 0.0), ParameterError);
}

TEST(Transport, HopfLaxOfLinearFunction) {
  // Q_{1/2}(lambda x) = lambda x - lambda^2 / 4 away from the box edge.
  const auto spec = parse("x1^2/2", 1);
  const double x0[1] = {0.0};
  const auto mu = discretize(spec, 6.0, 600, x0);
  const double lambda = 0.8;
  std::vector<double> f(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) f[i] = lambda * mu.node(i)[0];
  const auto q = hopf_lax(f, 0.5, mu);
  for (std::size_t i = 100; i < mu.size(); ++i) {
    const double x = mu.node(i)[0];
    // Exact on the grid up to the squared distance to the nearest node of x - lambda/2.
    EXPECT_NEAR(q[i], lambda * x - lambda * lambda / 4, mu.spacing() * mu.spacing());
    EXPECT_LE(q[i], f[i]);
  }
}

TEST(Transport, HopfLaxTwoDimensionalIsBruteForceMinimum) {
  const auto spec = parse("x1^2/2 + x2^2/2", 2);
  const double x0[2] = {0.0, 0.0};
  const auto mu = discretize(spec, 2.0, 12, x0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(mu.size());
  for (double& v : f) v = u(rng);
  const auto q = hopf_lax(f, 0.3, mu);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double dx = mu.node(i)[0] - mu.node(j)[0], dy = mu.node(i)[1] - mu.node(j)[1];
      best = std::min(best, f[j] + (dx * dx + dy * dy) / 0.6);
    }
    EXPECT_NEAR(q[i], best, 1e-12);
  }
}

TEST(Transport, BobkovGotzeGaussianEqualityAndViolation) {
  const auto spec = parse("x1^2/2", 1);
  const double x0[1] = {0.0};
  const auto mu = discretize(spec, 8.0, 512, x0);
  std::vector<double> f(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) f[i] = mu.node(i)[0];
  // f = x: int exp(Q f / 2) = 1 at C = 1 and exp(1/4) at C = 1/2.
  EXPECT_NEAR(bobkov_gotze_test(mu, f, 1.0).value, 1.0, 1e-4);
  const auto bad = bobkov_gotze_test(mu, f, 0.5);
  EXPECT_NEAR(bad.value, std::exp(0.25), 1e-3);
  EXPECT_FALSE(bad.pass);
  std::vector<double> shifted(f);
  for (double& v : shifted) v += 1.0;
  EXPECT_THROW(bobkov_gotze_test(mu, shifted, 1.0), InputError);
}

TEST(Transport, CsvRoundTrip) {
  std::mt19937_64 rng(4);
  const auto a = random_measure(rng, 3, 7);
  std::stringstream ss;
  write_measure_csv(ss, a);
  const auto b = read_measure_csv(ss);
  ASSERT_EQ(b.dim, 3);
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(b.points[i], a.points[i]);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.weights[i], a.weights[i], 1e-15);
  std::stringstream plan;
  write_plan_csv(plan, wasserstein_exact(a, a, 2).plan);
  EXPECT_NE(plan.str().find("i,j,mass"), std::string::npos);
}
