#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ineqcert/audit.hpp"
#include "ineqcert/expr.hpp"
#include "ineqcert/measure.hpp"

namespace ineqcert {

enum class ConditionKind {
  QuadraticDrift,
  SetDrift,
  KusuokaStroock,
  Radial,
  GeneralizedRadial,
  PhiWeighted,
  WeightedGenerator,
};

std::string to_string(ConditionKind kind);

/// Outcome of a numerical audit of one sufficient condition.
///
/// The audit is only as good as its domain: a certified record states that the
/// inequality held at every sample point of `audit`, with `margin` the
/// smallest slack observed. Failed records carry a sample point where the
/// inequality is violated.
struct LyapunovCertificate {
  ConditionKind kind = ConditionKind::QuadraticDrift;
  /// Sub-form of the condition, e.g. "drift" or "inverse-weight-radial".
  std::string variant;
  /// Test function or weight family the condition was evaluated with.
  std::string family;
  std::map<std::string, double, std::less<>> parameters;
  AuditDomain audit;
  int dim = 1;
  std::array<double, 3> x0{};
  double margin = 0.0;
  bool certified = false;
  std::optional<std::array<double, 3>> witness;
  /// Leading-order balance of the condition for large |x|; a diagnostic only.
  std::optional<bool> asymptotic_agrees;
  std::string note;

  double param(std::string_view name) const;
  std::span<const double> base_point() const { return {x0.data(), static_cast<std::size_t>(dim)}; }
};

/// W = exp(U) with U = a V or U = a |x - x0|^2.
struct LyapunovFamily {
  enum class Kind { ExpAV, ExpADist2 };
  Kind kind = Kind::ExpADist2;
  double a = 0.25;

  static LyapunovFamily exp_av(double a) { return {Kind::ExpAV, a}; }
  static LyapunovFamily exp_a_dist2(double a) { return {Kind::ExpADist2, a}; }
  std::string name() const;
};

/// Derivatives of U = log W at one point.
struct LogJet {
  double value = 0.0;
  std::array<double, 3> gradient{};
  /// Pure second partials d_i^2 U.
  std::array<double, 3> second{};
  double laplacian = 0.0;
};

LogJet log_jet(const LyapunovFamily& family, const JetValue& v, std::span<const double> x, std::span<const double> x0);

/// L U + |grad U|^2 with L = Laplacian - grad V . grad.
double drift_quantity(const PotentialSpec& spec, const LyapunovFamily& family, std::span<const double> x,
                      std::span<const double> x0);

/// (L W) / W evaluated from the jet of W itself rather than through U.
double generator_ratio(const PotentialSpec& spec, const LyapunovFamily& family, std::span<const double> x,
                       std::span<const double> x0);

/// coef * r^exponent.
struct PowerLaw {
  double coef = 1.0;
  double exponent = 2.0;
  double operator()(double r) const;
};

/// Phi(r) = a0 + a1 r^q with a0 > 0.
struct PhiFunction {
  double a0 = 1.0;
  double a1 = 0.0;
  double q = 1.0;
  double operator()(double r) const;
};

/// Per-axis diffusion weights omega_i of the weighted generator.
class AxisWeights {
 public:
  enum class Kind { Unit, InverseQuadratic, Expression };

  static AxisWeights unit() { return AxisWeights(Kind::Unit); }
  /// omega_i = 1 / (1 + x_i^2).
  static AxisWeights inverse_quadratic() { return AxisWeights(Kind::InverseQuadratic); }
  /// One expression per axis, each over the full coordinate vector.
  static AxisWeights expression(std::vector<PotentialSpec> per_axis);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double weight(std::span<const double> x, int axis) const;
  /// d omega_i / d x_i.
  double derivative(std::span<const double> x, int axis) const;
  /// Adapter for dirichlet_form / spectral_gap.
  AxisWeight as_axis_weight() const;

 private:
  explicit AxisWeights(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<PotentialSpec> exprs_;
};

/// L U + |grad U|^2 + c d^2 <= b. Requires a > 0, and a < 1 for exp(aV).
LyapunovCertificate check_quadratic_drift(const PotentialSpec& spec, const LyapunovFamily& family, double c,
                                          std::span<const double> x0, const AuditDomain& audit);

/// L W <= -lambda W + b 1_{B(x0, r0)}, audited as L W / W <= -lambda outside
/// the ball and W (L W / W + lambda) <= b inside it.
LyapunovCertificate check_set_drift(const PotentialSpec& spec, const LyapunovFamily& family, double lambda, double b,
                                    double r0, std::span<const double> x0, const AuditDomain& audit);

/// Converts a certified quadratic drift (c, b) into (lambda, b', r0) with
/// r0 = sqrt((b + lambda) / c) and b' = (b + lambda) sup_{B(x0, r0)} W, then
/// audits the result directly.
LyapunovCertificate set_drift_from_quadratic(const PotentialSpec& spec, const LyapunovFamily& family,
                                             const LyapunovCertificate& quadratic, double lambda = 1.0);

/// Largest c (then smallest R) with (1 - a)|grad V|^2 - Laplacian V >= c |x - x0|^2
/// for R < |x - x0| <= outer.
LyapunovCertificate check_kusuoka_stroock(const PotentialSpec& spec, double a, std::span<const double> x0,
                                          const AuditDomain& audit);

enum class RadialForm {
  /// (x - x0) . grad V >= beta(|x - x0|) - shift.
  InnerProduct,
  /// Unit radial derivative; also reports eta with d_r V >= eta r.
  UnitRadial,
};

LyapunovCertificate check_radial(const PotentialSpec& spec, const PowerLaw& beta, double shift,
                                 std::span<const double> x0, const AuditDomain& audit,
                                 RadialForm form = RadialForm::InnerProduct);

/// L U + |grad U|^2 + c d^2 Phi(2 d) <= b together with the curvature side
/// lambda_min(Hess V) >= -Phi(d).
LyapunovCertificate check_phi_weighted(const PotentialSpec& spec, const LyapunovFamily& family,
                                       const PhiFunction& phi, double c, std::span<const double> x0,
                                       const AuditDomain& audit);

/// Smallest a1 (with the given a0, q) such that lambda_min(Hess V) >= -Phi(d)
/// on the audit domain, inflated by a small safety factor.
PhiFunction fit_phi(const PotentialSpec& spec, std::span<const double> x0, const AuditDomain& audit, double q,
                    double a0 = 1.0);

/// Drift for the weighted generator: lambda = -max of (L~ W)/W outside
/// B(x0, R) and b = max over the ball of W ((L~ W)/W + lambda). R <= 0 picks
/// the smallest audited R in the inner half with a negative outer maximum.
LyapunovCertificate check_weighted_generator(const PotentialSpec& spec, const AxisWeights& omega,
                                             const LyapunovFamily& family, double radius,
                                             std::span<const double> x0, const AuditDomain& audit);

/// Largest c, smallest R with
/// sum_i (1 - a) omega_i (d_i V)^2 - d_i omega_i d_i V - omega_i d_i^2 V >= c outside B(x0, R).
LyapunovCertificate check_weighted_kusuoka_stroock(const PotentialSpec& spec, const AxisWeights& omega, double a,
                                                   std::span<const double> x0, const AuditDomain& audit);

/// Largest c, smallest R with
/// sum_i x_i d_i V / (1 + x_i^2) - (1 - x_i^2) / (1 + x_i^2)^2 >= c outside B(x0, R).
LyapunovCertificate check_inverse_weight_radial(const PotentialSpec& spec, std::span<const double> x0,
                                                const AuditDomain& audit);

/// Sum evaluated by check_inverse_weight_radial at one point.
double inverse_weight_radial_sum(const PotentialSpec& spec, std::span<const double> x);

struct CurvatureBound {
  /// min over the audit domain of lambda_min(Hess V).
  double K = 0.0;
  std::array<double, 3> argmin{};
  std::vector<ShellStat> profile;
};

CurvatureBound curvature_bound(const PotentialSpec& spec, std::span<const double> x0, const AuditDomain& audit);

/// Smallest eigenvalue of the Hessian in a JetValue.
double min_hessian_eigenvalue(const JetValue& j);

struct DirectionalCurvature {
  double radius = 0.0;
  double min_eigenvalue = 0.0;
  double half_laplacian = 0.0;
};

/// lambda_min(Hess V) and Laplacian V / 2 along the ray x0 + r u.
std::vector<DirectionalCurvature> directional_curvature(const PotentialSpec& spec, std::span<const double> x0,
                                                        std::span<const double> direction,
                                                        const std::vector<double>& radii);

}  // namespace ineqcert
