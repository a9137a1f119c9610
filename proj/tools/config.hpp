#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineqcert/audit.hpp"
#include "ineqcert/certify.hpp"
#include "ineqcert/serialize.hpp"

namespace ineqcert::cli {

/// Invalid or inconsistent run configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConditionConfig {
  /// quadratic_drift, set_drift, kusuoka_stroock, radial, phi_weighted,
  /// weighted_generator, weighted_kusuoka_stroock or inverse_weight_radial.
  std::string type;
  /// Lyapunov test function: exp_dist2 (W = exp(a d^2)) or exp_v (W = exp(a V)).
  std::string family;
  NamedValues params;
};

struct VerifyConfig {
  std::string w2h_family = "shifts";
  int w2h_budget = 20;
  int lsi_probes = 8;
  bool checks = true;
  /// Grid resolution for transport-based checks; 0 keeps the main grid.
  int transport_n = 0;
  int tilts = 20;
  int functions = 20;
  int monotonicity_functions = 5;
};

struct RunConfig {
  std::string potential;
  ConstantMap constants;
  int dim = 1;
  double L = 8.0;
  int n = 256;
  std::vector<double> x0;
  AuditDomain audit;
  std::vector<ConditionConfig> conditions;
  bool certify_poincare = true;
  bool certify_w2h = true;
  bool certify_lsi = true;
  bool certify_weighted = false;
  std::optional<double> delta;
  std::optional<double> eta;
  VerifyConfig verify;
  std::uint64_t seed = 1;
  std::string out = "ineq-certify-out";
  /// Multiplies every certified constant before the soundness check (negative control).
  double corrupt_factor = 1.0;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_yaml_text(const std::string& text);

/// Parses "type:key=value,key=value" as used by --condition.
ConditionConfig parse_condition(const std::string& text, const std::string& default_family);
/// Parses "k=4" as used by --const.
std::pair<std::string, double> parse_constant(const std::string& text);

/// Checks ranges and parses the potential. Throws ConfigError.
void validate(const RunConfig& config);

Json to_json(const RunConfig& config);

}  // namespace ineqcert::cli
