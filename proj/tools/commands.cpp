#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "config.hpp"
#include "ineqcert/error.hpp"
#include "ineqcert/transport.hpp"
#include "pipeline.hpp"

#ifndef INEQ_CERTIFY_VERSION
#define INEQ_CERTIFY_VERSION "dev"
#endif

namespace ineqcert::cli {
namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> potential;
  std::vector<std::string> constants;
  std::optional<int> dim;
  std::optional<double> L;
  std::optional<int> n;
  std::vector<double> x0;
  std::vector<std::string> conditions;
  std::string family = "exp_dist2";
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> corrupt_factor;
  bool json = false;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--potential", o.potential, "potential V, e.g. \"x1^2/2\" or \"r^2*(2+sin(k*theta))\"");
  cmd->add_option("--const", o.constants, "named constant k=value (repeatable)");
  cmd->add_option("--dim", o.dim, "dimension (1 to 3)");
  cmd->add_option("--grid-L", o.L, "half width of the box [-L, L]^d");
  cmd->add_option("--grid-n", o.n, "cells per axis");
  cmd->add_option("--x0", o.x0, "base point")->expected(1, 3);
  cmd->add_option("--condition", o.conditions, "condition type:key=value,... (repeatable)");
  cmd->add_option("--family", o.family, "default Lyapunov family for --condition")
      ->check(CLI::IsMember({"exp_dist2", "exp_v"}));
  cmd->add_option("--eta", o.eta, "truncation parameter eta");
  cmd->add_option("--delta", o.delta, "Gaussian integrability exponent delta");
  cmd->add_option("--seed", o.seed, "seed of every randomized search");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--corrupt-factor", o.corrupt_factor, "scale certified constants before soundness checks");
  cmd->add_flag("--json", o.json, "print the JSON report to stdout");
}

RunConfig build_config(const Overrides& o, std::optional<RunConfig> base = std::nullopt) {
  RunConfig c = base ? *base : (o.config_path.empty() ? RunConfig{} : load_config(o.config_path));
  if (o.potential) c.potential = *o.potential;
  for (const auto& k : o.constants) c.constants.insert_or_assign(parse_constant(k).first, parse_constant(k).second);
  if (o.dim) c.dim = *o.dim;
  if (o.L) c.L = *o.L;
  if (o.n) c.n = *o.n;
  if (!o.x0.empty()) c.x0 = o.x0;
  for (const auto& s : o.conditions) c.conditions.push_back(parse_condition(s, o.family));
  if (o.eta) c.eta = *o.eta;
  if (o.delta) c.delta = *o.delta;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.corrupt_factor) c.corrupt_factor = *o.corrupt_factor;
  validate(c);
  return c;
}

void print_certificates(const CertifyResult& r) {
  const std::pair<const char*, const std::optional<InequalityCertificate>*> rows[] = {
      {"poincare", &r.poincare}, {"w2h", &r.w2h}, {"lsi", &r.lsi}, {"weighted_poincare", &r.weighted}};
  for (const auto& [cc, cert] : r.conditions)
    std::cout << "condition " << cc.type << ": " << (cert.certified ? "certified" : "NOT certified")
              << " (margin " << cert.margin << ")\n";
  if (r.curvature) std::cout << "curvature lower bound K = " << r.curvature->K << "\n";
  for (const auto& [name, cert] : rows)
    if (*cert) std::cout << name << " constant = " << (*cert)->constant << "\n";
  for (const auto& f : r.failures) std::cout << "failure: " << f << "\n";
}

int cmd_certify(const Overrides& o) {
  const auto cfg = build_config(o);
  const auto r = run_certify(cfg);
  write_bundle(cfg.out, r.report, transcript(r), {});
  if (o.json)
    std::cout << r.report.dump(2) << "\n";
  else
    print_certificates(r);
  return r.failures.empty() ? 0 : 2;
}

void print_verify(const VerifyResult& v) {
  print_certificates(v.certified);
  for (const auto& [name, s] : v.soundness)
    std::cout << "soundness " << name << ": " << (s.pass() ? "ok" : "FAILED") << " (certified " << s.certified
              << ", empirical " << s.empirical << ")\n";
  for (const auto& ch : v.checks)
    std::cout << "check " << ch.name << ": " << (ch.pass ? "pass" : "FAIL") << " over " << ch.rows.size()
              << " cases, worst slack " << ch.worst_slack << "\n";
}

int cmd_verify(const Overrides& o) {
  const auto cfg = build_config(o);
  const auto v = run_verify(cfg);
  write_bundle(cfg.out, v.report, transcript(v.certified), v.checks);
  if (o.json)
    std::cout << v.report.dump(2) << "\n";
  else
    print_verify(v);
  return v.pass ? 0 : 2;
}

int cmd_reproduce(const Overrides& o, const std::string& id) {
  const auto cfg = build_config(o, example_config(id));
  const auto r = run_reproduce(id, cfg);
  write_bundle(cfg.out, r.report, transcript(r.run.certified), r.run.checks);
  if (o.json) {
    std::cout << r.report.dump(2) << "\n";
  } else {
    print_verify(r.run);
    for (const auto& f : r.facts) std::cout << (f.pass ? "[ok]   " : "[FAIL] ") << f.claim << ": " << f.value << "\n";
  }
  return r.pass ? 0 : 2;
}

DiscreteMeasure read_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measure file '" + path + "'");
  return read_measure_csv(in);
}

struct TransportArgs {
  std::string mu, nu, method = "exact", plan;
  int p = 2;
  double epsilon = 1e-3;
};

int cmd_transport(const TransportArgs& a) {
  const auto mu = read_measure(a.mu);
  const auto nu = read_measure(a.nu);
  TransportPlan plan;
  if (a.method == "exact") {
    const auto r = wasserstein_exact(mu, nu, a.p);
    std::cout << "W" << a.p << " = " << r.distance << "\nduality gap = " << r.duality_gap << "\npivots = " << r.pivots
              << "\n";
    plan = r.plan;
  } else {
    const auto r = wasserstein_sinkhorn(mu, nu, a.p, a.epsilon);
    std::cout << "W" << a.p << " (sinkhorn upper bound) = " << r.distance << "\niterations = " << r.iterations
              << "\nconverged = " << (r.converged ? "yes" : "no") << "\n";
    plan = r.plan;
  }
  if (!a.plan.empty()) {
    std::ofstream os(a.plan);
    write_plan_csv(os, plan);
  }
  return 0;
}

struct ProbeArgs {
  double delta = 1.0;
  std::vector<int> copies{1, 2, 4, 8};
  int samples = 100000;
};

int cmd_probe_integrability(const Overrides& o, const ProbeArgs& p) {
  const auto cfg = build_config(o);
  const auto mu = discretize(parse(cfg.potential, cfg.dim, cfg.constants), cfg.L, cfg.n,
                             cfg.x0.empty() ? std::vector<double>(cfg.dim, 0.0) : cfg.x0);
  const auto r = integrability_probe(mu, p.delta);
  Json j{{"delta", p.delta}, {"divergent", r.divergent}, {"value", r.value},
         {"threshold", locate_integrability_threshold(mu, 1e-3, 8.0)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_probe_concentration(const Overrides& o, const ProbeArgs& p) {
  const auto cfg = build_config(o);
  const auto mu = discretize(parse(cfg.potential, cfg.dim, cfg.constants), cfg.L, cfg.n,
                             cfg.x0.empty() ? std::vector<double>(cfg.dim, 0.0) : cfg.x0);
  Json out = Json::array();
  for (int n : p.copies) {
    ConcentrationOptions opt;
    opt.samples = p.samples;
    opt.seed = cfg.seed;
    out.push_back(to_json(concentration_probe(mu, n, opt)));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Certify functional inequality constants for Boltzmann measures", "ineq-certify"};
  app.set_version_flag("--version", INEQ_CERTIFY_VERSION);
  app.require_subcommand(1);

  Overrides o;
  auto* certify = app.add_subcommand("certify", "audit conditions and assemble certificates");
  add_run_options(certify, o);
  auto* verify = app.add_subcommand("verify", "certify, then run empirical estimates and intermediate checks");
  add_run_options(verify, o);
  std::string example;
  auto* reproduce = app.add_subcommand("reproduce", "run a named worked example");
  reproduce->add_option("id", example, "ex2_5, ex4_4 or cor4_7_gaussian")->required();
  add_run_options(reproduce, o);

  TransportArgs ta;
  auto* transport = app.add_subcommand("transport", "Wasserstein distance between two CSV measures");
  transport->add_option("--mu", ta.mu, "first measure (CSV)")->required()->check(CLI::ExistingFile);
  transport->add_option("--nu", ta.nu, "second measure (CSV)")->required()->check(CLI::ExistingFile);
  transport->add_option("--p", ta.p, "order")->check(CLI::IsMember({1, 2}));
  transport->add_option("--method", ta.method, "exact or sinkhorn")->check(CLI::IsMember({"exact", "sinkhorn"}));
  transport->add_option("--epsilon", ta.epsilon, "relative entropic regularization")->check(CLI::PositiveNumber);
  transport->add_option("--plan", ta.plan, "write the coupling to this CSV file");

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe", "diagnostic probes");
  probe->require_subcommand(1);
  auto* integ = probe->add_subcommand("integrability", "Gaussian integrability of the measure");
  add_run_options(integ, o);
  integ->add_option("--probe-delta", pa.delta, "exponent to test");
  auto* conc = probe->add_subcommand("concentration", "Monte Carlo concentration of product measures");
  add_run_options(conc, o);
  conc->add_option("--copies", pa.copies, "numbers of product copies")->check(CLI::PositiveNumber);
  conc->add_option("--samples", pa.samples, "samples per copy count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*certify) return cmd_certify(o);
    if (*verify) return cmd_verify(o);
    if (*reproduce) return cmd_reproduce(o, example);
    if (*transport) return cmd_transport(ta);
    if (*integ) return cmd_probe_integrability(o, pa);
    if (*conc) return cmd_probe_concentration(o, pa);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "potential: " << e.what() << "\n";
    return 1;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ineqcert::cli
