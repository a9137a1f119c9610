#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ineqcert/lyapunov.hpp"
#include "ineqcert/measure.hpp"

namespace ineqcert {

enum class InequalityKind { Poincare, RestrictedLsi, W2H, Lsi, WeightedPoincare, DefectiveLsi };

std::string to_string(InequalityKind kind);

using NamedValues = std::map<std::string, double, std::less<>>;

/// One derivation step: a named rule applied to recorded inputs. Replaying
/// the rule on the inputs must reproduce the outputs bit for bit.
struct ChainStep {
  std::string rule;
  std::string description;
  /// True when the formula is a re-derivation that the source argument only
  /// states qualitatively.
  bool derived = false;
  NamedValues inputs;
  NamedValues outputs;
  /// Name of the output carried forward as this step's constant.
  std::string result;
};

/// Evaluates the rule of a step on the given inputs.
NamedValues evaluate_step(std::string_view rule, const NamedValues& inputs);

ChainStep make_step(std::string rule, NamedValues inputs);

struct InequalityCertificate {
  InequalityKind kind = InequalityKind::Poincare;
  double constant = 0.0;
  std::vector<ChainStep> chain;
  std::vector<LyapunovCertificate> assumptions;
  /// Grid quantities consumed by the chain (moments, spectral estimates, ...).
  NamedValues measured;
  std::string note;

  /// Re-evaluates every step, checks that recorded outputs and the values
  /// passed between steps agree exactly, and returns the final constant.
  /// Throws Error on any mismatch.
  double replay() const;
  /// One line per step.
  std::string transcript() const;
};

/// C_P = 1 / lambda_1 of the grid Dirichlet form. The spectral gap is also
/// computed at half resolution; the certified value is the larger of the
/// fine-grid and Richardson-extrapolated constants.
InequalityCertificate poincare_constant(const GridMeasure& mu);

/// Default eta = 0.95 min(1, delta / 2).
double default_eta(double delta);

/// Restricted LSI through the truncation argument. `lyap` must be a certified
/// quadratic drift; eta defaults to default_eta(delta).
InequalityCertificate restricted_lsi_constant(const GridMeasure& mu, const LyapunovCertificate& lyap,
                                              const InequalityCertificate& poincare, double delta,
                                              std::optional<double> eta = std::nullopt);

/// C = max(C_eta, 1 / (2 eta)).
InequalityCertificate w2h_certificate(const InequalityCertificate& restricted, double eta);

/// Defective LSI from HWI and the transport-TV bound, tightened with the
/// spectral gap. Requires K <= 0.
InequalityCertificate lsi_bounded_curvature(const GridMeasure& mu, const LyapunovCertificate& lyap, double K,
                                            const InequalityCertificate& poincare);

/// LSI from a Phi-weighted certificate: A' = 2 sqrt(2/(c Phi(0))) + 1/c,
/// B' = 2b sqrt(2/(c Phi(0))) + 2b/c, C = A' + (B' + 2) C_P.
InequalityCertificate lsi_unbounded_curvature(const GridMeasure& mu, const LyapunovCertificate& phi_cert,
                                              const InequalityCertificate& poincare);

/// 1 / lambda_1 of the weighted Dirichlet form sum_i omega_i (d_i g)^2 at the
/// grid resolution and half of it. `wg_cert` justifies finiteness.
InequalityCertificate weighted_poincare_certificate(const GridMeasure& mu, const LyapunovCertificate& wg_cert,
                                                    const AxisWeights& omega);

/// Richardson extrapolation of a second-order quantity from n and n/2.
double richardson(double fine, double coarse);

/// Golden-section minimization of g over log(x) in [log_lo, log_hi].
double golden_section_log(const std::function<double(double)>& g, double log_lo, double log_hi,
                          double tolerance = 1e-9);

}  // namespace ineqcert
