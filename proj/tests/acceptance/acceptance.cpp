#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "ineqcert/certify.hpp"
#include "ineqcert/error.hpp"
#include "ineqcert/serialize.hpp"
#include "ineqcert/transport.hpp"
#include "ineqcert/verify.hpp"
#include "pipeline.hpp"

namespace {

using namespace ineqcert;
using namespace ineqcert::cli;
using Clock = std::chrono::steady_clock;

const std::string kOut = (std::filesystem::temp_directory_path() / "ineq-certify-acceptance").string();

// Accumulates sub-results of one criterion; the first failing detail is reported.
struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

int run(int index, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) o.require(false, "runtime " + num(secs) + " s over " + num(budget_s) + " s");
  std::printf("%s  criterion %d  %-40s %7.2f s%s%s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), secs,
              o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

RunConfig gaussian_config() {
  auto c = config_from_yaml_text(R"yaml(
potential: "x1^2/2"
dim: 1
grid: {L: 8, n: 512}
audit: {inner: 0, outer: 6}
conditions:
  - {type: quadratic_drift, family: exp_dist2, a: 0.25, c: 0.2}
verify: {checks: false}
)yaml");
  c.out = kOut + "/gaussian";
  return c;
}

// Certificates from every run, for the chain-integrity criterion.
std::vector<InequalityCertificate> emitted;

void collect(const CertifyResult& r) {
  for (const auto* c : {&r.poincare, &r.w2h, &r.lsi, &r.weighted})
    if (*c) emitted.push_back(**c);
  for (const auto& c : r.lsi_candidates) emitted.push_back(c);
}

std::optional<SoundnessReport> soundness_of(const VerifyResult& v, const std::string& name) {
  for (const auto& [n, s] : v.soundness)
    if (n == name) return s;
  return std::nullopt;
}

Outcome gaussian_gold_standard() {
  Outcome o;
  const auto cfg = gaussian_config();
  const auto r = run_certify(cfg);
  collect(r);
  const auto& mu = r.mu;
  const double poincare = empirical_poincare(mu).value;
  const double lsi = empirical_lsi(mu, 8, cfg.seed).value;
  const double w2h = empirical_w2h(mu, W2hFamily::GaussianShifts, 20, cfg.seed).value;
  o.require(std::abs(poincare - 1.0) <= 0.02, "empirical Poincare " + num(poincare));
  o.require(std::abs(lsi - 1.0) <= 0.05, "empirical LSI " + num(lsi));
  o.require(std::abs(w2h - 1.0) <= 0.05, "empirical W2H " + num(w2h));
  o.require(r.w2h && r.w2h->constant >= 1.0, "certified W2H missing or below 1");
  o.require(r.lsi && r.lsi->constant >= 1.0, "certified LSI missing or below 1");
  if (o.pass)
    o.detail = "C_P~" + num(poincare) + " LSI~" + num(lsi) + " W2H~" + num(w2h) + " certified W2H " +
               num(r.w2h->constant) + " LSI " + num(r.lsi->constant);
  return o;
}

Outcome transport_exactness() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  double worst_exact = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto a = testing::random_measure(rng, 1 + t % 3, 2 + t % 3);
    const auto b = testing::random_measure(rng, 1 + t % 3, 2 + (t / 3) % 3);
    const int p = 1 + t % 2;
    const double lp = wasserstein_exact(a, b, p).plan.cost;
    worst_exact = std::max(worst_exact, std::abs(lp - testing::brute_force_cost(a, b, p)));
  }
  o.require(worst_exact <= 1e-9, "LP vs brute force " + num(worst_exact));
  double worst_sinkhorn = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto a = testing::random_measure(rng, 2, 64);
    const auto b = testing::random_measure(rng, 2, 64);
    const double exact = wasserstein_exact(a, b, 2).distance;
    const double approx = wasserstein_sinkhorn(a, b, 2, 1e-3).distance;
    worst_sinkhorn = std::max(worst_sinkhorn, std::abs(approx - exact) / exact);
  }
  o.require(worst_sinkhorn <= 1e-3, "Sinkhorn relative error " + num(worst_sinkhorn));
  if (o.pass) o.detail = "LP error " + num(worst_exact) + ", Sinkhorn rel error " + num(worst_sinkhorn);
  return o;
}

std::optional<VerifyResult> ex25_run;

Outcome modulated_quadratic() {
  Outcome o;
  auto cfg = example_config("ex2_5");
  cfg.out = kOut + "/ex2_5";
  auto rep = run_reproduce("ex2_5", cfg);
  collect(rep.run.certified);
  for (const auto& f : rep.facts) o.require(f.pass, f.claim + " = " + f.value);
  const auto& c = rep.run.certified;
  o.require(c.condition("radial") && c.condition("radial")->param("c") >= 2.0 - 1e-9, "radial c below 2");
  o.require(c.curvature && c.curvature->K <= -2.0, "K above -2");
  o.require(integrability_probe(c.mu, 1.0).divergent, "Wang probe finite at delta = 1");
  o.require(c.w2h && std::isfinite(c.w2h->constant), "no finite W2H certificate");
  o.require(c.lsi && std::isfinite(c.lsi->constant), "no finite LSI certificate");
  if (o.pass)
    o.detail = "c=" + num(c.condition("radial")->param("c")) + " K=" + num(c.curvature->K) + " W2H " +
               num(c.w2h->constant) + " LSI " + num(c.lsi->constant);
  ex25_run = std::move(rep.run);
  return o;
}

Outcome modulated_cubic() {
  Outcome o;
  auto cfg = example_config("ex4_4");
  cfg.out = kOut + "/ex4_4";
  const auto rep = run_reproduce("ex4_4", cfg);
  collect(rep.run.certified);
  for (const auto& f : rep.facts) o.require(f.pass, f.claim + " = " + f.value);
  const auto s = soundness_of(rep.run, "lsi");
  o.require(s && s->pass(), "empirical LSI exceeds certified constant");
  o.require(rep.run.certified.condition("phi_weighted") != nullptr, "phi-weighted condition not certified");
  if (o.pass) o.detail = "LSI certified " + num(s->certified) + ", empirical " + num(s->empirical);
  return o;
}

Outcome intermediate_suite() {
  Outcome o;
  if (!ex25_run) throw Error("requires the modulated quadratic run");
  const auto& v = *ex25_run;
  const std::vector<std::pair<std::string, std::size_t>> expected{
      {"phi_domination", 100}, {"restricted_lsi", 50}, {"w1i", 20},         {"hwi", 20},
      {"tv_transport", 20},    {"bobkov_gotze", 20},   {"lambda_monotonicity", 10}};
  std::size_t total = 0;
  for (const auto& [name, rows] : expected) {
    const CheckReport* found = nullptr;
    for (const auto& ch : v.checks)
      if (ch.name == name) found = &ch;
    o.require(found != nullptr, "missing check " + name);
    if (!found) continue;
    o.require(found->rows.size() == rows, name + " ran " + std::to_string(found->rows.size()) + " cases");
    int violations = 0;
    for (const auto& row : found->rows) violations += row.pass ? 0 : 1;
    o.require(violations == 0, name + ": " + std::to_string(violations) + " violations");
    total += found->rows.size();
  }
  o.require(v.certified.curvature && v.certified.curvature->K <= 0.0, "HWI needs K <= 0");
  if (o.pass) o.detail = std::to_string(total) + " cases, 0 violations";
  return o;
}

Outcome chain_integrity() {
  Outcome o;
  o.require(!emitted.empty(), "no certificates collected");
  for (const auto& c : emitted) {
    o.require(c.replay() == c.constant, to_string(c.kind) + " replay mismatch");
    const auto back = certificate_from_json(Json::parse(to_json(c).dump()));
    o.require(back.replay() == c.constant, to_string(c.kind) + " JSON round trip mismatch");
  }
  const InequalityCertificate* w2h = nullptr;
  const InequalityCertificate* lsi = nullptr;
  for (const auto& c : emitted) {
    if (c.kind == InequalityKind::W2H && !w2h) w2h = &c;
    for (const auto& s : c.chain)
      if (s.rule == "lsi-bounded-curvature" && !lsi) lsi = &c;
  }
  o.require(w2h && lsi, "missing W2H or bounded-curvature LSI chain");
  if (!o.pass) return o;
  auto inputs_of = [](const InequalityCertificate& c, const char* rule) {
    for (const auto& s : c.chain)
      if (s.rule == rule) return s;
    throw Error(std::string("no step ") + rule);
  };
  const auto restricted = inputs_of(*w2h, "restricted-lsi");
  double previous = -INFINITY;
  for (int k = 0; k < 10; ++k) {
    auto in = restricted.inputs;
    in["b"] = in.at("b") * (1.0 + 0.5 * k);
    const double value = evaluate_step("restricted-lsi", in).at(restricted.result);
    o.require(value >= previous, "C_eta decreased in b at point " + std::to_string(k));
    previous = value;
  }
  const auto bounded = inputs_of(*lsi, "lsi-bounded-curvature");
  previous = -INFINITY;
  for (int k = 0; k < 10; ++k) {
    auto in = bounded.inputs;
    in["K"] = -1.0 * k;
    const double value = evaluate_step("lsi-bounded-curvature", in).at(bounded.result);
    o.require(value >= previous, "C_LSI decreased in -K at point " + std::to_string(k));
    previous = value;
  }
  if (o.pass) o.detail = std::to_string(emitted.size()) + " certificates replayed, sweeps monotone";
  return o;
}

Outcome weighted_poincare() {
  Outcome o;
  auto cfg = example_config("cor4_7_gaussian");
  cfg.out = kOut + "/cor4_7";
  const auto rep = run_reproduce("cor4_7_gaussian", cfg);
  collect(rep.run.certified);
  for (const auto& f : rep.facts) o.require(f.pass, f.claim + " = " + f.value);
  o.require(rep.run.certified.weighted.has_value(), "no weighted Poincare certificate");
  if (o.pass) o.detail = "constant " + num(rep.run.certified.weighted->constant) + ", n vs 2n rel " + rep.facts.back().value;
  return o;
}

Outcome negative_controls() {
  Outcome o;
  const auto cfg = gaussian_config();
  const auto mu = discretize(parse(cfg.potential, 1), cfg.L, cfg.n, std::vector<double>{0.0});
  std::vector<TestFunction> f = random_smooth_functions(mu, 20, 5);
  std::vector<double> x(mu.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mu.coordinate(i, 0);
  f.push_back({"x", x});
  for (auto& g : f) {
    const double m = moment(mu, g.values);
    for (double& v : g.values) v -= m;
  }
  o.require(check_bobkov_gotze(mu, 1.0, f).pass, "Bobkov-Gotze fails at C = 1");
  o.require(!check_bobkov_gotze(mu, 0.5, f).pass, "Bobkov-Gotze passes at C = 0.5");

  auto corrupt = cfg;
  corrupt.corrupt_factor = 0.5;
  corrupt.out = kOut + "/corrupt";
  const auto v = run_verify(corrupt);
  bool tripped = false;
  for (const auto& [name, s] : v.soundness) tripped = tripped || !s.pass();
  o.require(tripped && !v.pass, "halved certificate passed soundness");

  auto bad = cfg;
  bad.conditions = {parse_condition("quadratic_drift:a=1.5,c=0.2", "exp_v")};
  bool rejected = false;
  try {
    validate(bad);
  } catch (const ConfigError&) {
    rejected = true;
  }
  o.require(rejected, "a = 1.5 accepted by validation");
  const char* argv[] = {"ineq-certify", "certify", "--potential", "x1^2/2", "--family", "exp_v",
                        "--condition", "quadratic_drift:a=1.5,c=0.2", "--out", nullptr};
  const std::string out = kOut + "/bad";
  argv[9] = out.c_str();
  std::fflush(stderr);
  const int code = run_cli(10, argv);
  o.require(code == 1, "CLI exit code " + std::to_string(code) + " for a = 1.5");
  if (o.pass) o.detail = "all three controls tripped";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  failures += run(1, "Gaussian gold standard", 30, gaussian_gold_standard);
  failures += run(2, "optimal transport exactness", 60, transport_exactness);
  failures += run(3, "radially modulated quadratic (k=4)", 120, modulated_quadratic);
  failures += run(4, "cubic with k=6 modulation", 180, modulated_cubic);
  failures += run(5, "intermediate inequality suite", 0, intermediate_suite);
  failures += run(6, "constant chain integrity", 0, chain_integrity);
  failures += run(7, "weighted Poincare on the Gaussian", 0, weighted_poincare);
  failures += run(8, "negative controls", 0, negative_controls);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
