#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ineqcert/error.hpp"
#include "ineqcert/spectral.hpp"

#ifndef INEQ_CERTIFY_VERSION
#define INEQ_CERTIFY_VERSION "dev"
#endif

namespace ineqcert::cli {
namespace {

double get(const ConditionConfig& c, const char* key, double fallback) {
  const auto it = c.params.find(key);
  return it == c.params.end() ? fallback : it->second;
}

LyapunovFamily family_of(const ConditionConfig& c) {
  const double a = get(c, "a", 0.0);
  return c.family == "exp_v" ? LyapunovFamily::exp_av(a) : LyapunovFamily::exp_a_dist2(a);
}

LyapunovCertificate evaluate_condition(const ConditionConfig& c, const PotentialSpec& spec, std::span<const double> x0,
                                       const AuditDomain& audit) {
  if (c.type == "quadratic_drift") return check_quadratic_drift(spec, family_of(c), get(c, "c", 0.0), x0, audit);
  if (c.type == "set_drift")
    return check_set_drift(spec, family_of(c), get(c, "lambda", 1.0), get(c, "b", 0.0), get(c, "r0", 1.0), x0, audit);
  if (c.type == "kusuoka_stroock") return check_kusuoka_stroock(spec, get(c, "a", 0.5), x0, audit);
  if (c.type == "radial")
    return check_radial(spec, PowerLaw{get(c, "coef", 1.0), get(c, "exponent", 2.0)}, get(c, "shift", 0.0), x0, audit,
                        get(c, "unit", 0.0) != 0.0 ? RadialForm::UnitRadial : RadialForm::InnerProduct);
  if (c.type == "phi_weighted") {
    const double q = get(c, "q", 1.0), a0 = get(c, "a0", 1.0);
    PhiFunction phi{a0, 0.0, q};
    if (c.params.contains("a1"))
      phi.a1 = c.params.at("a1");
    else
      phi = fit_phi(spec, x0, audit, q, a0);
    return check_phi_weighted(spec, family_of(c), phi, get(c, "c", 0.0), x0, audit);
  }
  if (c.type == "weighted_generator")
    return check_weighted_generator(spec, AxisWeights::inverse_quadratic(), family_of(c), get(c, "R", 0.0), x0, audit);
  if (c.type == "weighted_kusuoka_stroock")
    return check_weighted_kusuoka_stroock(spec, AxisWeights::inverse_quadratic(), get(c, "a", 0.5), x0, audit);
  if (c.type == "inverse_weight_radial") return check_inverse_weight_radial(spec, x0, audit);
  throw ConfigError("unknown condition type '" + c.type + "'");
}

std::vector<double> base_point(const RunConfig& c) {
  return c.x0.empty() ? std::vector<double>(static_cast<std::size_t>(c.dim), 0.0) : c.x0;
}

Json header(const RunConfig& config, const char* command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "ineq-certify";
  j["version"] = INEQ_CERTIFY_VERSION;
  j["command"] = command;
  j["config"] = to_json(config);
  j["seed"] = config.seed;
  return j;
}

W2hFamily w2h_family(const std::string& name) {
  if (name == "tilts") return W2hFamily::ExponentialTilts;
  if (name == "mixtures") return W2hFamily::TwoBumpMixtures;
  return W2hFamily::GaussianShifts;
}

std::vector<TestFunction> recentered(const GridMeasure& mu, std::vector<TestFunction> fs) {
  for (auto& f : fs) {
    const double m = moment(mu, f.values);
    for (double& v : f.values) v -= m;
  }
  return fs;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

const LyapunovCertificate* CertifyResult::condition(std::string_view type) const {
  for (const auto& [cfg, cert] : conditions)
    if (cfg.type == type && cert.certified) return &cert;
  return nullptr;
}

CertifyResult run_certify(const RunConfig& config) {
  validate(config);
  const auto spec = parse(config.potential, config.dim, config.constants);
  const auto x0 = base_point(config);
  CertifyResult r;
  r.mu = discretize(spec, config.L, config.n, x0);
  r.report = header(config, "certify");
  r.report["grid"] = to_json(r.mu);

  Json conds = Json::array();
  for (const auto& cc : config.conditions) {
    try {
      auto cert = evaluate_condition(cc, spec, x0, config.audit);
      if (!cert.certified)
        r.failures.push_back("condition " + cc.type + " not certified" + (cert.note.empty() ? "" : ": " + cert.note));
      conds.push_back(to_json(cert));
      r.conditions.emplace_back(cc, std::move(cert));
    } catch (const ParameterError& e) {
      throw ConfigError("condition " + cc.type + ": " + e.what());
    } catch (const Error& e) {
      r.failures.push_back("condition " + cc.type + ": " + e.what());
      conds.push_back({{"kind", cc.type}, {"certified", false}, {"error", e.what()}});
    }
  }
  r.report["conditions"] = conds;

  try {
    r.curvature = curvature_bound(spec, x0, config.audit);
    const auto deg = spec.growth_degree();
    r.curvature_bounded = deg && *deg <= 2.0;
    r.report["curvature"] = {{"K", r.curvature->K},
                             {"argmin", std::vector<double>(r.curvature->argmin.begin(),
                                                            r.curvature->argmin.begin() + config.dim)},
                             {"bounded_globally", r.curvature_bounded}};
    const double K = r.curvature->K;
    const double delta_wang = std::abs(std::min(K, 0.0)) / 2.0 + 0.01;
    const auto probe = integrability_probe(r.mu, delta_wang);
    r.report["wang"] = {{"delta", delta_wang},
                        {"integral", probe.divergent ? "divergent" : "finite"},
                        {"applies", !probe.divergent && r.curvature_bounded}};
  } catch (const Error& e) {
    r.report["curvature"] = {{"error", e.what()}};
  }

  Json certs = Json::object();
  const double threshold = locate_integrability_threshold(r.mu, 1e-3, 8.0);
  const double delta = config.delta.value_or(0.95 * threshold);
  r.report["integrability"] = {{"threshold", threshold}, {"delta", delta}};
  const double eta = config.eta.value_or(default_eta(delta));

  try {
    r.poincare = poincare_constant(r.mu);
    if (config.certify_poincare) certs["poincare"] = to_json(*r.poincare);
  } catch (const Error& e) {
    r.failures.push_back(std::string("poincare: ") + e.what());
  }

  const LyapunovCertificate* drift = r.condition("quadratic_drift");
  if (config.certify_w2h) {
    if (!drift) {
      r.failures.push_back("w2h: needs a certified quadratic_drift condition");
    } else if (r.poincare) {
      try {
        const auto restricted = restricted_lsi_constant(r.mu, *drift, *r.poincare, delta, eta);
        r.w2h = w2h_certificate(restricted, eta);
        certs["w2h"] = to_json(*r.w2h);
      } catch (const Error& e) {
        r.failures.push_back(std::string("w2h: ") + e.what());
      }
    }
  }

  if (config.certify_lsi && r.poincare) {
    try {
      if (drift && r.curvature && r.curvature_bounded)
        r.lsi_candidates.push_back(lsi_bounded_curvature(r.mu, *drift, std::min(r.curvature->K, 0.0), *r.poincare));
      for (const auto& [cc, cert] : r.conditions)
        if (cc.type == "phi_weighted" && cert.certified)
          r.lsi_candidates.push_back(lsi_unbounded_curvature(r.mu, cert, *r.poincare));
    } catch (const Error& e) {
      r.failures.push_back(std::string("lsi: ") + e.what());
    }
    for (const auto& c : r.lsi_candidates)
      if (!r.lsi || c.constant < r.lsi->constant) r.lsi = c;
    if (r.lsi)
      certs["lsi"] = to_json(*r.lsi);
    else
      r.failures.push_back(
          "lsi: needs a quadratic_drift with globally bounded curvature or a certified phi_weighted condition");
  }

  if (config.certify_weighted) {
    const LyapunovCertificate* wg = nullptr;
    for (const auto& [cc, cert] : r.conditions)
      if (cert.kind == ConditionKind::WeightedGenerator && cert.certified) wg = &cert;
    if (!wg) {
      r.failures.push_back("weighted_poincare: needs a certified weighted condition");
    } else {
      try {
        r.weighted = weighted_poincare_certificate(r.mu, *wg, AxisWeights::inverse_quadratic());
        certs["weighted_poincare"] = to_json(*r.weighted);
      } catch (const Error& e) {
        r.failures.push_back(std::string("weighted_poincare: ") + e.what());
      }
    }
  }
  r.report["certificates"] = certs;
  r.report["failures"] = r.failures;
  r.report["status"] = r.failures.empty() ? "certified" : "failed";
  return r;
}

VerifyResult run_verify(const RunConfig& config) {
  VerifyResult v;
  v.certified = run_certify(config);
  auto& c = v.certified;
  const auto& mu = c.mu;
  const auto x0 = base_point(config);
  v.report = c.report;
  v.report["command"] = "verify";

  for (auto* cert : {&c.poincare, &c.w2h, &c.lsi, &c.weighted})
    if (*cert) (*cert)->constant *= config.corrupt_factor;

  int tn = config.verify.transport_n;
  if (tn == 0) tn = config.dim >= 2 ? std::min(config.n, 32) : config.n;
  const GridMeasure mu_t = tn == config.n ? mu : discretize(mu.spec(), config.L, tn, x0);

  Json estimates = Json::object();
  auto sound = [&](const char* name, const std::optional<InequalityCertificate>& cert, const EmpiricalEstimate& est) {
    estimates[name] = to_json(est);
    if (!cert) return;
    const auto rep = soundness_check(*cert, est);
    estimates[name]["soundness"] = to_json(rep);
    v.soundness.emplace_back(name, rep);
  };
  try {
    if (c.poincare && config.certify_poincare) sound("poincare", c.poincare, empirical_poincare(mu));
    if (config.certify_w2h)
      sound("w2h", c.w2h, empirical_w2h(mu_t, w2h_family(config.verify.w2h_family), config.verify.w2h_budget, config.seed));
    if (config.certify_lsi) sound("lsi", c.lsi, empirical_lsi(mu, config.verify.lsi_probes, config.seed));
    if (config.certify_weighted) sound("weighted_poincare", c.weighted, empirical_poincare(mu, AxisWeights::inverse_quadratic()));
  } catch (const Error& e) {
    c.failures.push_back(std::string("empirical estimate: ") + e.what());
  }
  v.report["estimates"] = estimates;

  if (config.verify.checks) {
    try {
      const auto& vc = config.verify;
      const auto g = random_smooth_functions(mu, 2 * vc.functions, config.seed + 11);
      const std::vector<TestFunction> half(g.begin(), g.begin() + vc.functions);
      if (const auto* drift = c.condition("quadratic_drift"))
        v.checks.push_back(check_phi_domination(mu, drift->param("c"), drift->param("b"), g));
      if (c.poincare) {
        const double cp = c.poincare->constant;
        v.checks.push_back(check_restricted_lsi(mu, cp, half));
        const auto tilts = random_tilts(mu_t, vc.tilts, config.seed + 23);
        v.checks.push_back(check_w1i(mu_t, cp, tilts));
        if (c.curvature && c.curvature_bounded) v.checks.push_back(check_hwi(mu_t, std::min(c.curvature->K, 0.0), tilts));
        v.checks.push_back(tv_transport_bound_check(mu_t, tilts));
      }
      if (c.w2h) {
        const auto f = recentered(mu, random_smooth_functions(mu, vc.tilts, config.seed + 37));
        v.checks.push_back(check_bobkov_gotze(mu, c.w2h->constant, f));
        Json mono = Json::array();
        const auto mf = recentered(mu, random_smooth_functions(mu, vc.monotonicity_functions, config.seed + 41));
        CheckReport summary{"lambda_monotonicity", 0.0, {}, true, 0.0};
        for (const auto& fn : mf) {
          const auto rep = lambda_monotonicity_probe(mu, fn.values, 1.0 / (2.0 * c.w2h->constant));
          summary.tolerance = rep.tolerance;
          summary.add(fn.label, rep.worst_increase, 0.0);
          summary.add(fn.label + ":G(1)", rep.G.back(), 1.0);
          mono.push_back(to_json(rep));
        }
        v.checks.push_back(summary);
        v.report["monotonicity"] = mono;
      }
    } catch (const Error& e) {
      c.failures.push_back(std::string("checks: ") + e.what());
    }
  }
  Json checks = Json::array();
  for (const auto& ch : v.checks) checks.push_back(to_json(ch));
  v.report["checks"] = checks;

  v.pass = c.failures.empty();
  for (const auto& ch : v.checks) v.pass = v.pass && ch.pass;
  for (const auto& [name, s] : v.soundness) v.pass = v.pass && s.pass();
  v.report["failures"] = c.failures;
  v.report["status"] = v.pass ? "pass" : "fail";
  return v;
}

RunConfig example_config(const std::string& id) {
  if (id == "ex2_5")
    return config_from_yaml_text(R"yaml(
potential: "r^2*(2+sin(k*theta))"
constants: {k: 4}
dim: 2
grid: {L: 4.5, n: 64}
x0: [0, 0]
audit: {inner: 1, outer: 4}
conditions:
  - {type: radial, coef: 2, exponent: 2}
  - {type: quadratic_drift, family: exp_dist2, a: 0.5, c: 1}
certify: {delta: 0.5}
verify: {budget: 12, transport_n: 32, tilts: 20, functions: 50}
)yaml");
  if (id == "ex4_4")
    return config_from_yaml_text(R"yaml(
potential: "r^p*(2+sin(k*theta))"
constants: {p: 3, k: 6}
dim: 2
grid: {L: 3, n: 128}
x0: [0, 0]
audit: {inner: 0, outer: 3}
conditions:
  - {type: phi_weighted, family: exp_dist2, a: 1, c: 0.05, q: 1}
certify: {w2h: false}
verify: {checks: false}
)yaml");
  if (id == "cor4_7_gaussian")
    return config_from_yaml_text(R"yaml(
potential: "x1^2/2"
dim: 1
grid: {L: 8, n: 512}
audit: {inner: 0, outer: 8}
conditions:
  - {type: inverse_weight_radial}
  - {type: weighted_generator, family: exp_v, a: 0.5}
certify: {w2h: false, lsi: false, weighted_poincare: true}
verify: {checks: false}
)yaml");
  throw ConfigError("unknown example id '" + id + "' (ex2_5, ex4_4, cor4_7_gaussian)");
}

ReproduceResult run_reproduce(const std::string& id, const RunConfig& config) {
  ReproduceResult out;
  out.run = run_verify(config);
  const auto& c = out.run.certified;
  const auto& spec = c.mu.spec();
  const auto x0 = base_point(config);
  auto fact = [&](std::string claim, double value, bool pass) {
    out.facts.push_back({std::move(claim), fmt(value), pass});
  };
  if (id == "ex2_5") {
    const double k = spec.constants().at("k");
    const auto* radial = c.condition("radial");
    fact("x . grad V = 2 r^2 g(theta) >= 2 r^2 on the annulus: certified c", radial ? radial->param("c") : 0.0,
         radial && radial->param("c") >= 2.0 - 1e-9);
    const double K = c.curvature ? c.curvature->K : 0.0;
    fact("curvature lower bound K <= 6 - k^2/2 = " + fmt(6 - k * k / 2), K, c.curvature && K <= 6 - k * k / 2);
    const bool div = integrability_probe(c.mu, 1.0).divergent;
    fact("int exp(r^2) dmu diverges, so the Gaussian integrability behind the curvature criterion fails", 1.0, div);
    fact("certified W2H constant is finite", c.w2h ? c.w2h->constant : INFINITY, c.w2h && std::isfinite(c.w2h->constant));
    fact("certified LSI constant is finite", c.lsi ? c.lsi->constant : INFINITY, c.lsi && std::isfinite(c.lsi->constant));
  } else if (id == "ex4_4") {
    const double p = spec.constants().at("p"), k = spec.constants().at("k");
    fact("curvature gate k > sqrt(3) p", k - std::sqrt(3.0) * p, k > std::sqrt(3.0) * p);
    double err = 0.0;
    for (double r : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
      for (int j = 0; j < 64; ++j) {
        const double t = 2 * std::numbers::pi * (j + 0.5) / 64;
        const double x[2] = {r * std::cos(t), r * std::sin(t)};
        const double s = std::sin(k * t);
        err = std::max(err, std::abs(spec.jet(x).laplacian - std::pow(r, p - 2) * (p * p * (2 + s) - k * k * s)));
      }
    fact("Laplacian V = r^(p-2) [p^2 (2 + sin k theta) - k^2 sin k theta], max pointwise error", err, err <= 1e-8);
    const auto* phi = c.condition("phi_weighted");
    fact("Phi-weighted drift with U = r^2 certified, fitted slope a1", phi ? phi->param("a1") : 0.0, phi != nullptr);
    const double t = std::numbers::pi / (2 * k);
    const double dir[2] = {std::cos(t), std::sin(t)};
    bool consistent = true;
    double worst = 0.0;
    for (const auto& s : directional_curvature(spec, x0, dir, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})) {
      const double bound = -0.5 * (k * k - 3 * p * p) * std::pow(s.radius, p - 2);
      worst = std::max(worst, std::abs(s.half_laplacian - bound) / std::abs(bound));
      consistent = consistent && s.min_eigenvalue <= 0.95 * bound && std::abs(s.half_laplacian - bound) <= 0.05 * std::abs(bound);
    }
    fact("lambda_min(Hess V) <= -(k^2 - 3p^2) r^(p-2) / 2 along sin(k theta) = 1, relative deviation of Laplacian/2",
         worst, consistent);
    fact("certified LSI constant is finite", c.lsi ? c.lsi->constant : INFINITY, c.lsi && std::isfinite(c.lsi->constant));
    for (const auto& [name, s] : out.run.soundness)
      if (name == "lsi") fact("empirical LSI estimate <= certified constant", s.empirical, s.pass());
  } else if (id == "cor4_7_gaussian") {
    const auto* simpl = [&]() -> const LyapunovCertificate* {
      for (const auto& [cc, cert] : c.conditions)
        if (cc.type == "inverse_weight_radial") return &cert;
      return nullptr;
    }();
    const bool ok = simpl && simpl->certified && simpl->param("c") > 0 && simpl->param("R") < 5;
    fact("sum x_i d_i V / (1 + x_i^2) - (1 - x_i^2) / (1 + x_i^2)^2 >= c > 0 outside B(0, R), R < 5: c",
         simpl && simpl->certified ? simpl->param("c") : 0.0, ok);
    fact("weighted Poincare constant is finite", c.weighted ? c.weighted->constant : INFINITY,
         c.weighted && std::isfinite(c.weighted->constant));
    if (c.weighted) {
      const auto w = AxisWeights::inverse_quadratic().as_axis_weight();
      const double l1 = spectral_gap(c.mu, w).eigenvalue;
      const auto fine = discretize(spec, config.L, 2 * config.n, x0);
      const double l2 = spectral_gap(fine, w).eigenvalue;
      const double rich = 1.0 / richardson(l2, l1);
      const double rel = std::abs(1.0 / l1 - rich) / rich;
      fact("weighted spectral constant at n within 5% of the 2n Richardson extrapolation", rel, rel <= 0.05);
    }
  } else {
    throw ConfigError("unknown example id '" + id + "'");
  }

  out.pass = out.run.pass;
  Json facts = Json::array();
  for (const auto& f : out.facts) {
    facts.push_back({{"claim", f.claim}, {"value", f.value}, {"pass", f.pass}});
    out.pass = out.pass && f.pass;
  }
  out.report = out.run.report;
  out.report["command"] = "reproduce";
  out.report["example"] = id;
  out.report["facts"] = facts;
  out.report["status"] = out.pass ? "pass" : "fail";
  return out;
}

std::string transcript(const CertifyResult& r) {
  std::ostringstream os;
  for (const auto* name : {"poincare", "w2h", "lsi", "weighted_poincare"}) {
    const std::optional<InequalityCertificate>* cert = nullptr;
    if (std::string_view(name) == "poincare") cert = &r.poincare;
    if (std::string_view(name) == "w2h") cert = &r.w2h;
    if (std::string_view(name) == "lsi") cert = &r.lsi;
    if (std::string_view(name) == "weighted_poincare") cert = &r.weighted;
    if (!*cert) continue;
    os << "== " << name << " ==\n" << (*cert)->transcript() << "\n";
  }
  return os.str();
}

void write_bundle(const std::string& dir, const Json& report, const std::string& text,
                  const std::vector<CheckReport>& checks) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / "report.json") << report.dump(2) << "\n";
  std::ofstream(fs::path(dir) / "transcript.txt") << text;
  if (checks.empty()) return;
  fs::create_directories(fs::path(dir) / "checks");
  for (const auto& ch : checks) {
    std::ofstream os(fs::path(dir) / "checks" / (ch.name + ".dat"));
    write_check_table(os, ch);
  }
}

}  // namespace ineqcert::cli
