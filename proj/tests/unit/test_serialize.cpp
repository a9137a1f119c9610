#include <sstream>

#include <gtest/gtest.h>

#include "ineqcert/error.hpp"
#include "ineqcert/serialize.hpp"

using namespace ineqcert;

namespace {

const double kZero[1] = {0.0};

}  // namespace

TEST(Serialize, CertificateRoundTripReplaysBitForBit) {
  const auto spec = parse("x1^2/2", 1);
  const auto mu = discretize(spec, 8.0, 128, kZero);
  AuditDomain audit;
  audit.outer = 6.0;
  const auto drift = check_quadratic_drift(spec, LyapunovFamily::exp_a_dist2(0.25), 0.25, kZero, audit);
  const auto cert = lsi_bounded_curvature(mu, drift, 0.0, poincare_constant(mu));
  const auto text = to_json(cert).dump();
  const auto back = certificate_from_json(Json::parse(text));
  EXPECT_EQ(back.constant, cert.constant);
  EXPECT_EQ(back.replay(), cert.constant);
  const auto j = Json::parse(text);
  EXPECT_EQ(j["assumptions"][0]["kind"], "quadratic-drift");
  EXPECT_EQ(j["assumptions"][0]["audit"]["outer"], 6.0);
}

TEST(Serialize, MalformedCertificateIsRejected) {
  EXPECT_THROW(certificate_from_json(Json::parse(R"({"kind":"lsi"})")), InputError);
  EXPECT_THROW(certificate_from_json(Json::parse(R"({"kind":"bogus","constant":1,"chain":[]})")), InputError);
}

TEST(Serialize, GridDescriptorAndCsv) {
  const auto spec = parse("a*x1^2", 1, {{"a", 0.5}});
  const auto mu = discretize(spec, 4.0, 8, kZero);
  const auto j = to_json(mu);
  EXPECT_EQ(j["potential"], "a*x1^2");
  EXPECT_EQ(j["constants"]["a"], 0.5);
  EXPECT_EQ(j["n"], 8);
  std::ostringstream os;
  write_grid_csv(os, mu);
  const auto s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x1,weight");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 9);
}

TEST(Serialize, CheckTableColumns) {
  CheckReport r{"demo", 0.1, {}, true, 0.0};
  r.add("first row", 1.0, 2.0);
  r.add("second", 3.0, 2.0);
  EXPECT_FALSE(r.pass);
  EXPECT_DOUBLE_EQ(r.worst_slack, -0.9);
  std::ostringstream os;
  write_check_table(os, r);
  EXPECT_NE(os.str().find("first_row 1 2 1.1"), std::string::npos);
  EXPECT_EQ(to_json(r)["violations"], 1);
}
