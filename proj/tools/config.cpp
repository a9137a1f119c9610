#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ineqcert/error.hpp"
#include "ineqcert/expr.hpp"

namespace ineqcert::cli {
namespace {

const std::set<std::string, std::less<>> kConditionTypes{
    "quadratic_drift", "set_drift",          "kusuoka_stroock",          "radial",
    "phi_weighted",    "weighted_generator", "weighted_kusuoka_stroock", "inverse_weight_radial"};

const std::set<std::string, std::less<>> kW2hFamilies{"shifts", "tilts", "mixtures"};

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& target) {
  if (const auto node = parent[key]) target = scalar<T>(node, key);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

double param(const ConditionConfig& c, const char* key) {
  const auto it = c.params.find(key);
  if (it == c.params.end()) throw ConfigError("condition '" + c.type + "' needs parameter '" + key + "'");
  return it->second;
}

void validate_family(const ConditionConfig& c) {
  const double a = param(c, "a");
  if (c.family == "exp_v") {
    require(a > 0.0 && a < 1.0, "condition '" + c.type + "': exp(aV) needs a in (0, 1), got " + std::to_string(a));
  } else if (c.family == "exp_dist2") {
    require(a > 0.0, "condition '" + c.type + "': exp(a d^2) needs a > 0");
  } else {
    throw ConfigError("condition '" + c.type + "': unknown family '" + c.family + "' (exp_dist2 or exp_v)");
  }
}

}  // namespace

std::pair<std::string, double> parse_constant(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("constant '" + text + "' must look like name=value");
  return {text.substr(0, eq), to_number(text.substr(eq + 1), "constant " + text.substr(0, eq))};
}

ConditionConfig parse_condition(const std::string& text, const std::string& default_family) {
  ConditionConfig c;
  c.family = default_family;
  const auto colon = text.find(':');
  c.type = text.substr(0, colon);
  if (colon == std::string::npos) return c;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("condition item '" + item + "' must look like key=value");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "family")
      c.family = value;
    else
      c.params[key] = to_number(value, "condition parameter " + key);
  }
  return c;
}

RunConfig config_from_yaml_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping");
  read(root, "potential", c.potential);
  read(root, "dim", c.dim);
  read(root, "seed", c.seed);
  read(root, "out", c.out);
  if (const auto k = root["constants"]) {
    require(k.IsMap(), "'constants' must be a mapping");
    for (const auto& kv : k) c.constants[kv.first.as<std::string>()] = scalar<double>(kv.second, "constants");
  }
  if (const auto g = root["grid"]) {
    read(g, "L", c.L);
    read(g, "n", c.n);
  }
  if (const auto x = root["x0"]) c.x0 = scalar<std::vector<double>>(x, "x0");
  if (const auto a = root["audit"]) {
    read(a, "inner", c.audit.inner);
    read(a, "outer", c.audit.outer);
    read(a, "shells", c.audit.shells);
    read(a, "directions", c.audit.directions);
  }
  if (const auto list = root["conditions"]) {
    require(list.IsSequence(), "'conditions' must be a list");
    for (const auto& item : list) {
      require(item.IsMap(), "each condition must be a mapping");
      ConditionConfig cc;
      cc.family = "exp_dist2";
      for (const auto& kv : item) {
        const auto key = kv.first.as<std::string>();
        if (key == "type")
          cc.type = scalar<std::string>(kv.second, key);
        else if (key == "family")
          cc.family = scalar<std::string>(kv.second, key);
        else
          cc.params[key] = scalar<double>(kv.second, "conditions." + key);
      }
      c.conditions.push_back(std::move(cc));
    }
  }
  if (const auto s = root["certify"]) {
    read(s, "poincare", c.certify_poincare);
    read(s, "w2h", c.certify_w2h);
    read(s, "lsi", c.certify_lsi);
    read(s, "weighted_poincare", c.certify_weighted);
    if (const auto d = s["delta"]) c.delta = scalar<double>(d, "certify.delta");
    if (const auto e = s["eta"]) c.eta = scalar<double>(e, "certify.eta");
  }
  if (const auto v = root["verify"]) {
    read(v, "w2h_family", c.verify.w2h_family);
    read(v, "budget", c.verify.w2h_budget);
    read(v, "lsi_probes", c.verify.lsi_probes);
    read(v, "checks", c.verify.checks);
    read(v, "transport_n", c.verify.transport_n);
    read(v, "tilts", c.verify.tilts);
    read(v, "functions", c.verify.functions);
    read(v, "monotonicity_functions", c.verify.monotonicity_functions);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_yaml_text(ss.str());
}

void validate(const RunConfig& c) {
  require(!c.potential.empty(), "no potential given");
  require(c.dim >= 1 && c.dim <= 3, "dim must be 1, 2 or 3");
  require(c.L > 0.0 && std::isfinite(c.L), "grid L must be positive");
  require(c.n >= 16, "grid n must be at least 16");
  require(c.x0.empty() || static_cast<int>(c.x0.size()) == c.dim, "x0 must have dim entries");
  require(c.audit.outer > c.audit.inner && c.audit.inner >= 0.0, "audit needs 0 <= inner < outer");
  require(c.audit.shells >= 3 && c.audit.directions >= 1, "audit needs at least 3 shells and 1 direction");
  try {
    parse(c.potential, c.dim, c.constants);
  } catch (const Error& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  for (const auto& cc : c.conditions) {
    require(kConditionTypes.contains(cc.type), "unknown condition type '" + cc.type + "'");
    if (cc.type == "quadratic_drift") {
      validate_family(cc);
      require(param(cc, "c") > 0.0, "quadratic_drift needs c > 0");
    } else if (cc.type == "set_drift") {
      validate_family(cc);
      require(param(cc, "lambda") > 0.0 && param(cc, "b") >= 0.0 && param(cc, "r0") > 0.0,
              "set_drift needs lambda > 0, b >= 0, r0 > 0");
    } else if (cc.type == "kusuoka_stroock" || cc.type == "weighted_kusuoka_stroock") {
      const double a = param(cc, "a");
      require(a >= 0.0 && a < 1.0, cc.type + " needs a in [0, 1)");
    } else if (cc.type == "radial") {
      require(param(cc, "coef") > 0.0, "radial needs coef > 0");
      param(cc, "exponent");
    } else if (cc.type == "phi_weighted") {
      validate_family(cc);
      require(param(cc, "c") > 0.0, "phi_weighted needs c > 0");
      const auto q = cc.params.find("q");
      require(q == cc.params.end() || q->second >= 0.0, "phi_weighted needs q >= 0");
    } else if (cc.type == "weighted_generator") {
      validate_family(cc);
    }
  }
  if (c.delta) require(*c.delta > 0.0, "delta must be positive");
  if (c.eta) require(*c.eta > 0.0 && *c.eta < 1.0, "eta must lie in (0, 1)");
  require(kW2hFamilies.contains(c.verify.w2h_family), "w2h_family must be shifts, tilts or mixtures");
  require(c.verify.w2h_budget >= 1 && c.verify.lsi_probes >= 1, "verify budgets must be positive");
  require(c.verify.transport_n == 0 || c.verify.transport_n >= 16, "transport_n must be 0 or at least 16");
  require(c.corrupt_factor > 0.0, "corrupt factor must be positive");
}

Json to_json(const RunConfig& c) {
  Json j;
  j["potential"] = c.potential;
  Json k = Json::object();
  for (const auto& [name, v] : c.constants) k[name] = v;
  j["constants"] = k;
  j["dim"] = c.dim;
  j["grid"] = {{"L", c.L}, {"n", c.n}};
  j["x0"] = c.x0;
  j["audit"] = to_json(c.audit);
  Json conds = Json::array();
  for (const auto& cc : c.conditions) {
    Json item{{"type", cc.type}, {"family", cc.family}};
    for (const auto& [name, v] : cc.params) item[name] = v;
    conds.push_back(item);
  }
  j["conditions"] = conds;
  j["certify"] = {{"poincare", c.certify_poincare}, {"w2h", c.certify_w2h}, {"lsi", c.certify_lsi},
                  {"weighted_poincare", c.certify_weighted}};
  if (c.delta) j["certify"]["delta"] = *c.delta;
  if (c.eta) j["certify"]["eta"] = *c.eta;
  j["verify"] = {{"w2h_family", c.verify.w2h_family},   {"budget", c.verify.w2h_budget},
                 {"lsi_probes", c.verify.lsi_probes},   {"checks", c.verify.checks},
                 {"transport_n", c.verify.transport_n}, {"tilts", c.verify.tilts},
                 {"functions", c.verify.functions},     {"monotonicity_functions", c.verify.monotonicity_functions}};
  j["seed"] = c.seed;
  j["out"] = c.out;
  if (c.corrupt_factor != 1.0) j["corrupt_factor"] = c.corrupt_factor;
  return j;
}

}  // namespace ineqcert::cli
