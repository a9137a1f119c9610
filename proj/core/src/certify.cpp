#include "ineqcert/certify.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ineqcert/error.hpp"
#include "ineqcert/spectral.hpp"

namespace ineqcert {
namespace {

double get(const NamedValues& v, std::string_view key) {
  const auto it = v.find(key);
  if (it == v.end()) throw InputError("chain step is missing input '" + std::string(key) + "'");
  return it->second;
}

void require_finite(const NamedValues& out, std::string_view rule) {
  for (const auto& [k, v] : out)
    if (!std::isfinite(v))
      throw SolverError(std::string(rule) + ": non-finite value for " + k);
}

NamedValues spectral_rule(const NamedValues& in, const char* name) {
  const double fine = get(in, "lambda_fine");
  const double coarse = get(in, "lambda_coarse");
  if (!(fine > 0.0) || !(coarse > 0.0)) throw SolverError("spectral gap estimate is not positive");
  const double rich = richardson(fine, coarse);
  NamedValues out;
  out["lambda_richardson"] = rich;
  out["C_fine"] = 1.0 / fine;
  out["C_richardson"] = rich > 0.0 ? 1.0 / rich : std::numeric_limits<double>::infinity();
  out[name] = std::max(out["C_fine"], out["C_richardson"]);
  return out;
}

NamedValues restricted_rule(const NamedValues& in) {
  const double cp = get(in, "C_P"), c = get(in, "c"), b = get(in, "b"), eta = get(in, "eta");
  const double m2 = get(in, "second_moment"), m2w = get(in, "weighted_moment");
  if (!(c > 0.0) || !(eta > 0.0)) throw ParameterError("restricted LSI needs c > 0 and eta > 0");
  NamedValues out;
  const double log_m = 2.0 * eta * m2;
  const double M = std::exp(log_m);
  const double c_eta_mu = log_m + 2.0 * eta * M * m2w;
  out["M"] = M;
  out["c_eta_mu"] = c_eta_mu;
  // Smallest truncation level meeting each of the three constraints.
  out["log_K_moment"] = 1.0 + 3.0 * log_m;
  out["log_K_entropy"] = 1.0 + 2.0 * c_eta_mu;
  out["log_K_drift"] = 1.0 + std::numbers::ln2 + 6.0 * eta * b / c;
  const double log_k = std::max({out["log_K_moment"], out["log_K_entropy"], out["log_K_drift"]});
  out["log_K"] = log_k;
  out["K"] = std::exp(log_k);
  const double restricted_poincare = 2.0 * cp * (2.0 * std::numbers::ln2 + 0.5 * (std::numbers::ln2 + log_k));
  const double s = std::numbers::sqrt2 - 1.0;
  const double drift_term = 4.0 * eta / (c * s * s);
  out["restricted_poincare_term"] = restricted_poincare;
  out["drift_term"] = drift_term;
  out["C_eta"] = 1.5 * (restricted_poincare + drift_term);
  if (!std::isfinite(M)) throw SolverError("restricted LSI: moment constraint has no admissible truncation level");
  if (!std::isfinite(c_eta_mu))
    throw SolverError("restricted LSI: entropy constraint has no admissible truncation level");
  return out;
}

double lsi_objective(double eps, double c, double b, double K, double cp, double mu_phi, double* A, double* B) {
  const double curv = 1.0 - K / 2.0;
  const double a = curv * (2.0 / c) + eps;
  const double bb = (2.0 / c) * (b + mu_phi) * (curv + 1.0 / eps);
  if (A) *A = a;
  if (B) *B = bb;
  return a + (bb + 2.0) * cp;
}

NamedValues lsi_bounded_rule(const NamedValues& in) {
  const double c = get(in, "c"), b = get(in, "b"), K = get(in, "K"), cp = get(in, "C_P"), mu_phi = get(in, "mu_phi");
  if (!(c > 0.0)) throw ParameterError("LSI chain needs c > 0");
  if (K > 0.0) throw ParameterError("bounded-curvature LSI chain needs K <= 0");
  const double eps = golden_section_log(
      [&](double e) { return lsi_objective(e, c, b, K, cp, mu_phi, nullptr, nullptr); }, -6.0, 6.0);
  NamedValues out;
  double A = 0.0, B = 0.0;
  out["C_LSI"] = lsi_objective(eps, c, b, K, cp, mu_phi, &A, &B);
  out["epsilon"] = eps;
  out["A"] = A;
  out["B"] = B;
  return out;
}

NamedValues lsi_unbounded_rule(const NamedValues& in) {
  const double c = get(in, "c"), b = get(in, "b"), phi0 = get(in, "phi0"), cp = get(in, "C_P");
  if (!(phi0 > 0.0)) throw ParameterError("Phi(0) must be positive");
  if (!(c > 0.0)) throw ParameterError("LSI chain needs c > 0");
  const double root = std::sqrt(2.0 / (c * phi0));
  NamedValues out;
  out["A"] = 2.0 * root + 1.0 / c;
  out["B"] = 2.0 * b * root + 2.0 * b / c;
  out["C_LSI"] = out["A"] + (out["B"] + 2.0) * cp;
  return out;
}

NamedValues w2h_rule(const NamedValues& in) {
  const double ce = get(in, "C_eta"), eta = get(in, "eta");
  if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  NamedValues out;
  out["inverse_two_eta"] = 1.0 / (2.0 * eta);
  out["C"] = std::max(ce, out["inverse_two_eta"]);
  return out;
}

const char* rule_description(std::string_view rule) {
  if (rule == "spectral-gap") return "Poincare constant from the grid spectral gap (fine grid and Richardson)";
  if (rule == "restricted-lsi")
    return "truncation argument: M, c(eta,mu), smallest admissible K, then C_eta from the restricted Poincare-entropy "
           "bound";
  if (rule == "w2h") return "restricted LSI to W2H via the Hopf-Lax semigroup: C = max(C_eta, 1/(2 eta))";
  if (rule == "lsi-bounded-curvature")
    return "defective LSI from HWI and the transport-TV bound, tightened with the spectral gap";
  if (rule == "lsi-unbounded-curvature") return "defective LSI from the Phi-weighted drift, tightened with the spectral gap";
  if (rule == "weighted-spectral-gap") return "weighted Poincare constant from the weighted grid spectral gap";
  return "";
}

InequalityCertificate spectral_certificate(const GridMeasure& mu, const AxisWeight& weights, InequalityKind kind,
                                           const char* rule) {
  if (mu.truncation_warning()) throw ParameterError("grid truncation too coarse for a Poincare estimate");
  const int coarse_n = mu.resolution() / 2;
  if (coarse_n < 8) throw ParameterError("grid too coarse for a two-resolution spectral estimate");
  const SpectralEstimate fine = spectral_gap(mu, weights);
  const GridMeasure coarse_mu = discretize(mu.spec(), mu.half_width(), coarse_n, mu.base_point());
  const SpectralEstimate coarse = spectral_gap(coarse_mu, weights);
  InequalityCertificate cert;
  cert.kind = kind;
  cert.chain.push_back(make_step(rule, {{"lambda_fine", fine.eigenvalue}, {"lambda_coarse", coarse.eigenvalue}}));
  cert.constant = cert.chain.back().outputs.at(cert.chain.back().result);
  cert.measured = {{"n", mu.resolution()},
                   {"n_coarse", coarse_n},
                   {"L", mu.half_width()},
                   {"boundary_mass", mu.boundary_mass()},
                   {"iterations_fine", fine.iterations},
                   {"iterations_coarse", coarse.iterations}};
  return cert;
}

}  // namespace

std::string to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::Poincare: return "poincare";
    case InequalityKind::RestrictedLsi: return "restricted_lsi";
    case InequalityKind::W2H: return "w2h";
    case InequalityKind::Lsi: return "lsi";
    case InequalityKind::WeightedPoincare: return "weighted_poincare";
    case InequalityKind::DefectiveLsi: return "defective_lsi";
  }
  return "unknown";
}

double richardson(double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; }

double golden_section_log(const std::function<double(double)>& g, double log_lo, double log_hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = log_lo, hi = log_hi;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = g(std::exp(x1)), f2 = g(std::exp(x2));
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(std::exp(x2));
    }
  }
  return std::exp(0.5 * (lo + hi));
}

NamedValues evaluate_step(std::string_view rule, const NamedValues& inputs) {
  NamedValues out;
  if (rule == "spectral-gap")
    out = spectral_rule(inputs, "C_P");
  else if (rule == "weighted-spectral-gap")
    out = spectral_rule(inputs, "C_w");
  else if (rule == "restricted-lsi")
    out = restricted_rule(inputs);
  else if (rule == "w2h")
    out = w2h_rule(inputs);
  else if (rule == "lsi-bounded-curvature")
    out = lsi_bounded_rule(inputs);
  else if (rule == "lsi-unbounded-curvature")
    out = lsi_unbounded_rule(inputs);
  else
    throw InputError("unknown chain rule '" + std::string(rule) + "'");
  require_finite(out, rule);
  return out;
}

ChainStep make_step(std::string rule, NamedValues inputs) {
  ChainStep step;
  step.description = rule_description(rule);
  step.derived = rule == "restricted-lsi";
  step.inputs = std::move(inputs);
  step.outputs = evaluate_step(rule, step.inputs);
  if (rule == "spectral-gap") step.result = "C_P";
  else if (rule == "weighted-spectral-gap") step.result = "C_w";
  else if (rule == "restricted-lsi") step.result = "C_eta";
  else if (rule == "w2h") step.result = "C";
  else step.result = "C_LSI";
  step.rule = std::move(rule);
  return step;
}

double InequalityCertificate::replay() const {
  if (chain.empty()) throw InputError("certificate has an empty chain");
  NamedValues carried;
  double last = 0.0;
  for (const auto& step : chain) {
    for (const auto& [k, v] : step.inputs) {
      const auto it = carried.find(k);
      if (it != carried.end() && it->second != v)
        throw Error("chain input '" + k + "' of step " + step.rule + " differs from the value produced earlier");
    }
    const NamedValues out = evaluate_step(step.rule, step.inputs);
    if (out != step.outputs) throw Error("chain step " + step.rule + " does not replay to its recorded outputs");
    for (const auto& [k, v] : out) carried[k] = v;
    last = out.at(step.result);
  }
  return last;
}

std::string InequalityCertificate::transcript() const {
  std::ostringstream os;
  os.precision(10);
  for (const auto& step : chain) {
    os << step.rule << (step.derived ? " [derived]" : "") << ": " << step.description << " |";
    for (const auto& [k, v] : step.inputs) os << ' ' << k << '=' << v;
    os << " ->";
    for (const auto& [k, v] : step.outputs) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << to_string(kind) << " constant = " << constant << '\n';
  return os.str();
}

InequalityCertificate poincare_constant(const GridMeasure& mu) {
  return spectral_certificate(mu, {}, InequalityKind::Poincare, "spectral-gap");
}

double default_eta(double delta) { return 0.95 * std::min(1.0, delta / 2.0); }

InequalityCertificate restricted_lsi_constant(const GridMeasure& mu, const LyapunovCertificate& lyap,
                                              const InequalityCertificate& poincare, double delta,
                                              std::optional<double> eta) {
  if (lyap.kind != ConditionKind::QuadraticDrift || !lyap.certified)
    throw InputError("restricted LSI needs a certified quadratic drift");
  if (poincare.kind != InequalityKind::Poincare) throw InputError("restricted LSI needs a Poincare certificate");
  if (!(delta > 0.0)) throw ParameterError("integrability exponent delta must be positive");
  const double e = eta.value_or(default_eta(delta));
  if (!(e > 0.0) || !(e < std::min(1.0, delta / 2.0))) throw ParameterError("eta must lie in (0, min(1, delta/2))");

  std::vector<double> d2(mu.size()), d2w(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    d2[i] = mu.distance_sq(i);
    d2w[i] = d2[i] * std::exp(2.0 * e * d2[i]);
  }
  const double m2 = moment(mu, d2);
  const double m2w = moment(mu, d2w);

  InequalityCertificate cert;
  cert.kind = InequalityKind::RestrictedLsi;
  cert.chain = poincare.chain;
  cert.chain.push_back(make_step("restricted-lsi", {{"C_P", poincare.constant},
                                                    {"c", lyap.param("c")},
                                                    {"b", lyap.param("b")},
                                                    {"eta", e},
                                                    {"delta", delta},
                                                    {"second_moment", m2},
                                                    {"weighted_moment", m2w}}));
  cert.constant = cert.chain.back().outputs.at("C_eta");
  cert.assumptions = poincare.assumptions;
  cert.assumptions.push_back(lyap);
  cert.measured = poincare.measured;
  cert.measured["second_moment"] = m2;
  cert.measured["weighted_moment"] = m2w;
  return cert;
}

InequalityCertificate w2h_certificate(const InequalityCertificate& restricted, double eta) {
  if (restricted.kind != InequalityKind::RestrictedLsi) throw InputError("W2H step needs a restricted LSI certificate");
  const auto& last = restricted.chain.back();
  if (last.inputs.at("eta") != eta) throw ParameterError("eta does not match the restricted LSI certificate");
  InequalityCertificate cert = restricted;
  cert.kind = InequalityKind::W2H;
  cert.chain.push_back(make_step("w2h", {{"C_eta", restricted.constant}, {"eta", eta}}));
  cert.constant = cert.chain.back().outputs.at("C");
  return cert;
}

InequalityCertificate lsi_bounded_curvature(const GridMeasure& mu, const LyapunovCertificate& lyap, double K,
                                            const InequalityCertificate& poincare) {
  if (lyap.kind != ConditionKind::QuadraticDrift || !lyap.certified)
    throw InputError("LSI chain needs a certified quadratic drift");
  if (poincare.kind != InequalityKind::Poincare) throw InputError("LSI chain needs a Poincare certificate");
  const double c = lyap.param("c");
  std::vector<double> d2(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) d2[i] = mu.distance_sq(i);
  const double mu_phi = c * moment(mu, d2);

  InequalityCertificate cert;
  cert.kind = InequalityKind::Lsi;
  cert.chain = poincare.chain;
  cert.chain.push_back(make_step("lsi-bounded-curvature",
                                 {{"c", c}, {"b", lyap.param("b")}, {"K", K}, {"C_P", poincare.constant}, {"mu_phi", mu_phi}}));
  cert.constant = cert.chain.back().outputs.at("C_LSI");
  cert.assumptions = poincare.assumptions;
  cert.assumptions.push_back(lyap);
  cert.measured = poincare.measured;
  cert.measured["mu_phi"] = mu_phi;
  return cert;
}

InequalityCertificate lsi_unbounded_curvature(const GridMeasure& mu, const LyapunovCertificate& phi_cert,
                                              const InequalityCertificate& poincare) {
  if (phi_cert.kind != ConditionKind::PhiWeighted || !phi_cert.certified)
    throw InputError("LSI chain needs a certified Phi-weighted condition");
  if (poincare.kind != InequalityKind::Poincare) throw InputError("LSI chain needs a Poincare certificate");
  (void)mu;
  InequalityCertificate cert;
  cert.kind = InequalityKind::Lsi;
  cert.chain = poincare.chain;
  cert.chain.push_back(make_step("lsi-unbounded-curvature", {{"c", phi_cert.param("c")},
                                                             {"b", phi_cert.param("b")},
                                                             {"phi0", phi_cert.param("phi0")},
                                                             {"C_P", poincare.constant}}));
  cert.constant = cert.chain.back().outputs.at("C_LSI");
  cert.assumptions = poincare.assumptions;
  cert.assumptions.push_back(phi_cert);
  cert.measured = poincare.measured;
  return cert;
}

InequalityCertificate weighted_poincare_certificate(const GridMeasure& mu, const LyapunovCertificate& wg_cert,
                                                    const AxisWeights& omega) {
  if (wg_cert.kind != ConditionKind::WeightedGenerator || !wg_cert.certified)
    throw InputError("weighted Poincare needs a certified weighted-generator condition");
  InequalityCertificate cert =
      spectral_certificate(mu, omega.as_axis_weight(), InequalityKind::WeightedPoincare, "weighted-spectral-gap");
  cert.assumptions.push_back(wg_cert);
  for (const auto& [k, v] : wg_cert.parameters) cert.measured["condition_" + k] = v;
  cert.note = "the weighted drift condition justifies finiteness; the value is the weighted spectral estimate";
  return cert;
}

}  // namespace ineqcert
