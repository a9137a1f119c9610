#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "ineqcert/lyapunov.hpp"
#include "ineqcert/measure.hpp"
#include "ineqcert/serialize.hpp"
#include "ineqcert/verify.hpp"

namespace ineqcert::cli {

struct CertifyResult {
  GridMeasure mu;
  std::vector<std::pair<ConditionConfig, LyapunovCertificate>> conditions;
  std::optional<CurvatureBound> curvature;
  /// True when the potential grows at most quadratically, so the audited K bounds the whole space.
  bool curvature_bounded = false;
  std::optional<InequalityCertificate> poincare;
  std::optional<InequalityCertificate> w2h;
  std::optional<InequalityCertificate> lsi;
  std::optional<InequalityCertificate> weighted;
  std::vector<InequalityCertificate> lsi_candidates;
  std::vector<std::string> failures;
  Json report;

  const LyapunovCertificate* condition(std::string_view type) const;
};

CertifyResult run_certify(const RunConfig& config);

struct VerifyResult {
  CertifyResult certified;
  std::vector<CheckReport> checks;
  std::vector<std::pair<std::string, SoundnessReport>> soundness;
  Json report;
  bool pass = false;
};

VerifyResult run_verify(const RunConfig& config);

struct Fact {
  std::string claim;
  std::string value;
  bool pass = false;
};

struct ReproduceResult {
  VerifyResult run;
  std::vector<Fact> facts;
  Json report;
  bool pass = false;
};

/// Canned configuration of a named example (ex2_5, ex4_4, cor4_7_gaussian).
RunConfig example_config(const std::string& id);
ReproduceResult run_reproduce(const std::string& id, const RunConfig& config);

/// Writes report.json, transcript.txt and any check tables into `dir`.
void write_bundle(const std::string& dir, const Json& report, const std::string& transcript,
                  const std::vector<CheckReport>& checks);

std::string transcript(const CertifyResult& r);

}  // namespace ineqcert::cli
