#include "ineqcert/serialize.hpp"

#include <algorithm>
#include <ostream>

#include "ineqcert/error.hpp"

namespace ineqcert {
namespace {

Json point(std::span<const double> x) { return Json(std::vector<double>(x.begin(), x.end())); }

Json named(const NamedValues& values) {
  Json j = Json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

NamedValues named_from(const Json& j) {
  NamedValues out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
  return out;
}

InequalityKind kind_from(const std::string& s) {
  for (auto k : {InequalityKind::Poincare, InequalityKind::RestrictedLsi, InequalityKind::W2H, InequalityKind::Lsi,
                 InequalityKind::WeightedPoincare, InequalityKind::DefectiveLsi})
    if (to_string(k) == s) return k;
  throw InputError("unknown inequality kind '" + s + "'");
}

}  // namespace

Json to_json(const GridMeasure& mu) {
  Json j;
  j["potential"] = mu.spec().source();
  j["constants"] = named(mu.spec().constants());
  j["dim"] = mu.dim();
  j["L"] = mu.half_width();
  j["n"] = mu.resolution();
  j["x0"] = point(mu.base_point());
  j["log_z"] = mu.log_z();
  j["boundary_mass"] = mu.boundary_mass();
  return j;
}

void write_grid_csv(std::ostream& os, const GridMeasure& mu) {
  os.precision(17);
  for (int k = 0; k < mu.dim(); ++k) os << "x" << k + 1 << ",";
  os << "weight\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double c : mu.node(i)) os << c << ",";
    os << mu.weights()[i] << "\n";
  }
}

Json to_json(const AuditDomain& audit) {
  return {{"inner", audit.inner}, {"outer", audit.outer}, {"shells", audit.shells}, {"directions", audit.directions}};
}

Json to_json(const LyapunovCertificate& cert) {
  Json j;
  j["kind"] = to_string(cert.kind);
  j["variant"] = cert.variant;
  j["family"] = cert.family;
  j["parameters"] = named(cert.parameters);
  j["audit"] = to_json(cert.audit);
  j["x0"] = point(cert.base_point());
  j["margin"] = cert.margin;
  j["certified"] = cert.certified;
  j["witness"] = cert.witness ? point(std::span<const double>(cert.witness->data(), cert.dim)) : Json(nullptr);
  if (cert.asymptotic_agrees) j["asymptotic_agrees"] = *cert.asymptotic_agrees;
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

Json to_json(const ChainStep& step) {
  return {{"rule", step.rule},       {"description", step.description}, {"derived", step.derived},
          {"inputs", named(step.inputs)}, {"outputs", named(step.outputs)},  {"result", step.result}};
}

Json to_json(const InequalityCertificate& cert) {
  Json j;
  j["kind"] = to_string(cert.kind);
  j["constant"] = cert.constant;
  Json chain = Json::array();
  for (const auto& s : cert.chain) chain.push_back(to_json(s));
  j["chain"] = chain;
  Json assumptions = Json::array();
  for (const auto& a : cert.assumptions) assumptions.push_back(to_json(a));
  j["assumptions"] = assumptions;
  j["measured"] = named(cert.measured);
  j["transcript"] = cert.transcript();
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

InequalityCertificate certificate_from_json(const Json& j) {
  try {
    InequalityCertificate c;
    c.kind = kind_from(j.at("kind").get<std::string>());
    c.constant = j.at("constant").get<double>();
    for (const auto& s : j.at("chain")) {
      ChainStep step;
      step.rule = s.at("rule").get<std::string>();
      step.description = s.value("description", "");
      step.derived = s.value("derived", false);
      step.inputs = named_from(s.at("inputs"));
      step.outputs = named_from(s.at("outputs"));
      step.result = s.at("result").get<std::string>();
      c.chain.push_back(std::move(step));
    }
    if (j.contains("measured")) c.measured = named_from(j.at("measured"));
    c.note = j.value("note", "");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed certificate: ") + e.what());
  }
}

Json to_json(const EmpiricalEstimate& est) {
  return {{"kind", to_string(est.kind)},
          {"value", est.value},
          {"witness", est.witness},
          {"witness_parameters", named(est.witness_parameters)},
          {"seed", est.seed},
          {"resolution", est.resolution},
          {"evaluations", est.evaluations}};
}

Json to_json(const CheckReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"label", r.label}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}, {"pass", r.pass}});
  return {{"name", report.name},
          {"tolerance", report.tolerance},
          {"pass", report.pass},
          {"worst_slack", report.worst_slack},
          {"violations", std::count_if(report.rows.begin(), report.rows.end(), [](const CheckRow& r) { return !r.pass; })},
          {"rows", rows}};
}

Json to_json(const MonotonicityReport& report) {
  return {{"lambdas", report.lambdas},       {"G", report.G},
          {"worst_increase", report.worst_increase}, {"tolerance", report.tolerance},
          {"monotone", report.monotone},     {"endpoint_ok", report.endpoint_ok},
          {"pass", report.pass}};
}

Json to_json(const ConcentrationReport& report) {
  return {{"n", report.n},
          {"threshold", report.threshold},
          {"mass_A", report.mass_A},
          {"r", report.r},
          {"p_hat", report.p_hat},
          {"fit", {{"a", report.a}, {"b", report.b}, {"r0", report.r0}, {"points", report.fit_points}}},
          {"wide_confidence", report.wide_confidence}};
}

Json to_json(const SoundnessReport& report) {
  return {{"replay_ok", report.replay_ok}, {"ordering_ok", report.ordering_ok}, {"certified", report.certified},
          {"empirical", report.empirical}, {"pass", report.pass()},            {"detail", report.detail}};
}

void write_check_table(std::ostream& os, const CheckReport& report) {
  os.precision(17);
  os << "# " << report.name << " tolerance " << report.tolerance << "\n# parameter lhs rhs slack\n";
  for (const auto& r : report.rows) {
    std::string label = r.label;
    for (char& ch : label)
      if (ch == ' ') ch = '_';
    os << label << " " << r.lhs << " " << r.rhs << " " << r.slack << "\n";
  }
}

}  // namespace ineqcert
