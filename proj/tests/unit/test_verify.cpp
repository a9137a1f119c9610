#include <cmath>

#include <gtest/gtest.h>

#include "ineqcert/error.hpp"
#include "ineqcert/verify.hpp"

using namespace ineqcert;

namespace {

const double kZero[1] = {0.0};

const GridMeasure& gaussian() {
  static const auto spec = parse("x1^2/2", 1);
  static const auto mu = discretize(spec, 8.0, 512, kZero);
  return mu;
}

const GridMeasure& coarse_gaussian() {
  static const auto mu = discretize(gaussian().spec(), 6.0, 128, kZero);
  return mu;
}

std::vector<double> identity(const GridMeasure& mu) {
  std::vector<double> f(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) f[i] = mu.node(i)[0];
  return f;
}

}  // namespace

TEST(Verify, ShiftedGaussianRatioIsOne) {
  // W_2^2 = m^2 and H = m^2 / 2 for exp(m x) N(0,1).
  const double m[1] = {1.0};
  const auto nu = exponential_tilt(coarse_gaussian(), m);
  EXPECT_NEAR(w2h_ratio(coarse_gaussian(), nu.density), 1.0, 2e-3);
}

TEST(Verify, GaussianEmpiricalConstants) {
  EXPECT_NEAR(empirical_poincare(gaussian()).value, 1.0, 0.02);
  const auto lsi = empirical_lsi(gaussian(), 8);
  EXPECT_NEAR(lsi.value, 1.0, 0.05);
  EXPECT_FALSE(lsi.witness.empty());
  const auto w = empirical_w2h(gaussian(), W2hFamily::GaussianShifts, 20);
  EXPECT_NEAR(w.value, 1.0, 0.05);
  EXPECT_LE(w.evaluations, 20);
}

TEST(Verify, EmpiricalSearchIsDeterministicInSeed) {
  const auto a = empirical_w2h(coarse_gaussian(), W2hFamily::ExponentialTilts, 12, 3);
  const auto b = empirical_w2h(coarse_gaussian(), W2hFamily::ExponentialTilts, 12, 3);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness, b.witness);
  EXPECT_LE(a.value, 1.0 + 0.05);
}

TEST(Verify, TwoBumpMixturesStayBelowGaussianConstant) {
  const auto w = empirical_w2h(coarse_gaussian(), W2hFamily::TwoBumpMixtures, 16);
  EXPECT_GT(w.value, 0.0);
  EXPECT_LE(w.value, 1.0 + 0.05);
}

TEST(Verify, IntermediateChecksPassOnGaussian) {
  const auto& mu = coarse_gaussian();
  const auto tilts = random_tilts(mu, 6, 5);
  EXPECT_TRUE(check_w1i(mu, 1.0, tilts).pass);
  EXPECT_TRUE(check_hwi(mu, 0.0, tilts).pass);
  EXPECT_TRUE(tv_transport_bound_check(mu, tilts).pass);
  const auto g = random_smooth_functions(mu, 20, 8);
  EXPECT_TRUE(check_phi_domination(mu, 0.25, 0.5, g).pass);
  EXPECT_TRUE(check_restricted_lsi(mu, 1.0, g).pass);
  EXPECT_TRUE(check_bobkov_gotze(mu, 1.0, g).pass);
  EXPECT_THROW(check_hwi(mu, 0.5, tilts), ParameterError);
}

TEST(Verify, W1iIsTightOnShifts) {
  const auto& mu = coarse_gaussian();
  std::vector<TestMeasure> shifts;
  for (double m : {0.5, 1.0}) {
    const double v[1] = {m};
    shifts.push_back(exponential_tilt(mu, v));
  }
  const auto r = check_w1i(mu, 1.0, shifts);
  ASSERT_TRUE(r.pass);
  for (const auto& row : r.rows) EXPECT_NEAR(row.lhs, row.rhs, 0.02 * row.rhs);
}

TEST(Verify, BobkovGotzeFailsBelowThreshold) {
  std::vector<TestFunction> f{{"x", identity(gaussian())}};
  EXPECT_TRUE(check_bobkov_gotze(gaussian(), 1.0, f).pass);
  EXPECT_FALSE(check_bobkov_gotze(gaussian(), 0.5, f).pass);
}

TEST(Verify, LambdaMonotonicityProbe) {
  const auto f = identity(gaussian());
  const auto ok = lambda_monotonicity_probe(gaussian(), f, 0.5);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.G.back(), 1.0, 1e-4);
  const auto bad = lambda_monotonicity_probe(gaussian(), f, 1.0);
  EXPECT_FALSE(bad.endpoint_ok);
  EXPECT_NEAR(bad.G.back(), std::exp(0.25), 1e-3);
}

TEST(Verify, ConcentrationGaussianTail) {
  ConcentrationOptions opt;
  opt.samples = 20000;
  const auto rep = concentration_probe(coarse_gaussian(), 1, opt);
  EXPECT_GE(rep.mass_A, 0.5);
  // mu(A^r) >= 1 - exp(-r^2 / 2) for half-spaces of mass 1/2.
  for (std::size_t k = 0; k < rep.r.size(); ++k)
    EXPECT_GE(rep.p_hat[k], 1.0 - std::exp(-rep.r[k] * rep.r[k] / 2) - 0.01);
  EXPECT_GT(rep.a, 0.0);
  opt.threshold = -3.0;
  EXPECT_THROW(concentration_probe(coarse_gaussian(), 1, opt), InputError);
}

TEST(Verify, ConcentrationIsReproducible) {
  ConcentrationOptions opt;
  opt.samples = 5000;
  const auto a = concentration_probe(coarse_gaussian(), 2, opt);
  const auto b = concentration_probe(coarse_gaussian(), 2, opt);
  EXPECT_EQ(a.p_hat, b.p_hat);
}

TEST(Verify, SoundnessCheck) {
  const auto P = poincare_constant(gaussian());
  const auto est = empirical_poincare(gaussian());
  EXPECT_TRUE(soundness_check(P, est).pass());
  auto halved = P;
  halved.constant *= 0.5;
  const auto rep = soundness_check(halved, est);
  EXPECT_FALSE(rep.pass());
  EXPECT_FALSE(rep.replay_ok);
  EXPECT_FALSE(rep.ordering_ok);
  EXPECT_THROW(soundness_check(P, empirical_lsi(coarse_gaussian(), 2)), InputError);
}
