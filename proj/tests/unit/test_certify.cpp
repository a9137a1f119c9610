#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ineqcert/certify.hpp"
#include "ineqcert/error.hpp"

using namespace ineqcert;

namespace {

const double kZero[1] = {0.0};

const GridMeasure& gaussian() {
  static const auto spec = parse("x1^2/2", 1);
  static const auto mu = discretize(spec, 8.0, 512, kZero);
  return mu;
}

LyapunovCertificate gaussian_drift() {
  AuditDomain audit;
  audit.outer = 6.0;
  return check_quadratic_drift(gaussian().spec(), LyapunovFamily::exp_a_dist2(0.25), 0.25, kZero, audit);
}

// Restricted-LSI constant written out independently of the library.
double restricted_hand(double cp, double c, double b, double eta, double m2, double m2w) {
  const double M = std::exp(2 * eta * m2);
  const double ce = std::log(M) + 2 * eta * M * m2w;
  const double logK = std::max({1 + 3 * std::log(M), 1 + 2 * ce, 1 + std::log(2.0) + 6 * eta * b / c});
  const double s = std::sqrt(2.0) - 1;
  return 1.5 * (2 * cp * (2 * std::log(2.0) + 0.5 * (std::log(2.0) + logK)) + 4 * eta / (c * s * s));
}

}  // namespace

TEST(Certify, GoldenSectionFindsClosedFormMinimum) {
  const double x = golden_section_log([](double e) { return e + 6.0 / e; }, -6.0, 6.0);
  EXPECT_NEAR(x, std::sqrt(6.0), 1e-7);
}

TEST(Certify, RichardsonRemovesSecondOrderError) {
  // lambda(h) = 1 + h^2 at h and 2h.
  EXPECT_NEAR(richardson(1.0 + 0.01, 1.0 + 0.04), 1.0, 1e-15);
}

TEST(Certify, BoundedCurvatureLsiClosedForm) {
  // (c, b) = (1/4, 1/2), K = 0, C_P = 1, mu(phi) = 1/4: min_eps (8 + eps) + 6 (1 + 1/eps) + 2 = 16 + 2 sqrt 6.
  const auto out = evaluate_step("lsi-bounded-curvature", {{"c", 0.25}, {"b", 0.5}, {"K", 0.0}, {"C_P", 1.0}, {"mu_phi", 0.25}});
  EXPECT_NEAR(out.at("C_LSI"), 16.0 + 2.0 * std::sqrt(6.0), 1e-9);
  EXPECT_NEAR(out.at("epsilon"), std::sqrt(6.0), 1e-6);
}

TEST(Certify, RestrictedLsiGaussianHandValue) {
  const double eta = 0.19;
  const double m2w = std::pow(1 - 4 * eta, -1.5);
  const auto out = evaluate_step("restricted-lsi", {{"C_P", 1.0}, {"c", 0.25}, {"b", 0.5}, {"eta", eta},
                                                    {"delta", 0.4}, {"second_moment", 1.0}, {"weighted_moment", m2w}});
  EXPECT_NEAR(out.at("C_eta"), restricted_hand(1.0, 0.25, 0.5, eta, 1.0, m2w), 1e-10);
  EXPECT_NEAR(out.at("C_eta"), 48.6, 0.05);
}

TEST(Certify, UnboundedCurvatureLsiFormula) {
  const auto out = evaluate_step("lsi-unbounded-curvature", {{"c", 0.5}, {"b", 2.0}, {"phi0", 1.0}, {"C_P", 0.5}});
  const double A = 2 * 2.0 + 2.0, B = 2 * 2 * 2.0 + 8.0;
  EXPECT_DOUBLE_EQ(out.at("A"), A);
  EXPECT_DOUBLE_EQ(out.at("B"), B);
  EXPECT_DOUBLE_EQ(out.at("C_LSI"), A + (B + 2) * 0.5);
}

TEST(Certify, PoincareCertificateOnGaussian) {
  const auto cert = poincare_constant(gaussian());
  EXPECT_NEAR(cert.constant, 1.0, 2e-4);
  EXPECT_GE(cert.constant, 1.0 - 1e-9);
  EXPECT_EQ(cert.replay(), cert.constant);
}

TEST(Certify, GaussianFullChain) {
  const auto P = poincare_constant(gaussian());
  const auto drift = gaussian_drift();
  ASSERT_TRUE(drift.certified);
  const double delta = 0.4, eta = default_eta(delta);
  EXPECT_DOUBLE_EQ(eta, 0.19);
  const auto R = restricted_lsi_constant(gaussian(), drift, P, delta);
  EXPECT_NEAR(R.constant, restricted_hand(P.constant, 0.25, drift.param("b"), eta, R.measured.at("second_moment"),
                                          R.measured.at("weighted_moment")),
              1e-9);
  const auto W = w2h_certificate(R, eta);
  EXPECT_GE(W.constant, 1.0);
  EXPECT_EQ(W.replay(), W.constant);
  const auto L = lsi_bounded_curvature(gaussian(), drift, 0.0, P);
  EXPECT_NEAR(L.constant, 16.0 + 2.0 * std::sqrt(6.0), 2e-2);
  EXPECT_EQ(L.replay(), L.constant);
  EXPECT_EQ(L.chain.front().rule, "spectral-gap");
  EXPECT_FALSE(L.transcript().empty());
}

TEST(Certify, ReplayDetectsTampering) {
  const auto L = lsi_bounded_curvature(gaussian(), gaussian_drift(), 0.0, poincare_constant(gaussian()));
  auto bad_output = L;
  bad_output.chain.back().outputs["A"] *= 1.0 + 1e-15;
  EXPECT_THROW(bad_output.replay(), Error);
  auto bad_link = L;
  bad_link.chain.back().inputs["C_P"] *= 2.0;
  EXPECT_THROW(bad_link.replay(), Error);
  auto bad_constant = L;
  bad_constant.constant *= 0.5;
  EXPECT_NE(bad_constant.replay(), bad_constant.constant);
}

TEST(Certify, RestrictedLsiMonotoneInDriftBound) {
  double previous = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double b = 0.5 + 2.0 * k;
    const double c = evaluate_step("restricted-lsi", {{"C_P", 1.0}, {"c", 0.25}, {"b", b}, {"eta", 0.19}, {"delta", 0.4},
                                                      {"second_moment", 1.0}, {"weighted_moment", 8.5}})
                         .at("C_eta");
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(Certify, LsiMonotoneInNegativeCurvature) {
  double previous = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double K = -1.5 * k;
    const double c = evaluate_step("lsi-bounded-curvature", {{"c", 0.25}, {"b", 0.5}, {"K", K}, {"C_P", 1.0}, {"mu_phi", 0.25}})
                         .at("C_LSI");
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(Certify, ParameterGuards) {
  const auto P = poincare_constant(gaussian());
  const auto drift = gaussian_drift();
  EXPECT_THROW(restricted_lsi_constant(gaussian(), drift, P, 0.4, 0.3), ParameterError);
  EXPECT_THROW(lsi_bounded_curvature(gaussian(), drift, 0.5, P), ParameterError);
  EXPECT_THROW(evaluate_step("no-such-rule", {}), Error);
  auto failed = drift;
  failed.certified = false;
  EXPECT_THROW(restricted_lsi_constant(gaussian(), failed, P, 0.4), InputError);
  const auto coarse = discretize(gaussian().spec(), 8.0, 12, kZero);
  EXPECT_THROW(poincare_constant(coarse), ParameterError);
}

TEST(Certify, WeightedPoincareConvergesUnderRefinement) {
  const auto omega = AxisWeights::inverse_quadratic();
  AuditDomain audit;
  audit.outer = 8.0;
  const auto wg = check_inverse_weight_radial(gaussian().spec(), kZero, audit);
  ASSERT_TRUE(wg.certified);
  const auto cert = weighted_poincare_certificate(gaussian(), wg, omega);
  EXPECT_TRUE(std::isfinite(cert.constant));
  EXPECT_GT(cert.constant, 1.0);
  EXPECT_EQ(cert.replay(), cert.constant);
}
