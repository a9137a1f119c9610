#include "ineqcert/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ineqcert/error.hpp"

namespace ineqcert {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative allowance for roundoff in pointwise slacks.
constexpr double kRoundoff = 1e-12;

double dist2(std::span<const double> x, std::span<const double> x0) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - x0[k]) * (x[k] - x0[k]);
  return s;
}

// Points where a partial function is undefined are skipped by the scan.
template <typename F>
PointFunction guarded(F f) {
  return [f](std::span<const double> x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : kNaN;
    } catch (const DomainError&) {
      return kNaN;
    }
  };
}

std::array<double, 3> to_array(std::span<const double> x) {
  std::array<double, 3> a{};
  std::copy(x.begin(), x.end(), a.begin());
  return a;
}

LyapunovCertificate make_certificate(ConditionKind kind, std::string variant, const PotentialSpec& spec,
                                     std::span<const double> x0, const AuditDomain& audit) {
  if (static_cast<int>(x0.size()) != spec.dim()) throw InputError("base point dimension does not match the potential");
  LyapunovCertificate cert;
  cert.kind = kind;
  cert.variant = std::move(variant);
  cert.audit = audit;
  cert.dim = spec.dim();
  cert.x0 = to_array(x0);
  return cert;
}

void validate_family(const LyapunovFamily& family) {
  if (!(family.a > 0.0)) throw ParameterError("Lyapunov family parameter a must be positive");
  if (family.kind == LyapunovFamily::Kind::ExpAV && !(family.a < 1.0))
    throw ParameterError("exp(a V) requires a in (0, 1)");
}

const ShellStat* last_live(const std::vector<ShellStat>& profile) {
  for (auto it = profile.rbegin(); it != profile.rend(); ++it)
    if (!it->empty) return &*it;
  return nullptr;
}

struct UpperBound {
  bool bounded = false;
  double b = 0.0;
  double margin = 0.0;
  std::array<double, 3> witness{};
};

// Sup of a drift quantity over the domain. Declared unbounded when the maximum
// is attained beyond the inner three quarters and the outermost shell is
// still increasing.
UpperBound drift_upper_bound(const std::vector<ShellStat>& profile, const AuditDomain& audit) {
  const double r75 = audit.inner + 0.75 * (audit.outer - audit.inner) + 1e-12;
  double inner_max = -std::numeric_limits<double>::infinity();
  double global = -std::numeric_limits<double>::infinity();
  std::array<double, 3> arg{};
  const ShellStat* prev = nullptr;
  const ShellStat* last = nullptr;
  for (const auto& s : profile) {
    if (s.empty) continue;
    if (s.radius <= r75) inner_max = std::max(inner_max, s.max);
    if (s.max > global) {
      global = s.max;
      arg = s.argmax;
    }
    prev = last;
    last = &s;
  }
  if (!last) throw InputError("drift quantity undefined on the whole audit domain");
  const double scale = 1.0 + std::abs(global);
  UpperBound out;
  const bool increasing = prev && last->max > prev->max + kRoundoff * scale;
  if (global > inner_max + 1e-9 * scale && increasing) {
    out.margin = inner_max - global;
    out.witness = last->argmax;
    return out;
  }
  const double safety = 1e-9 * scale;
  out.bounded = true;
  out.b = global + safety;
  out.margin = safety;
  out.witness = arg;
  return out;
}

void fill_threshold(LyapunovCertificate& cert, const std::vector<ShellStat>& profile) {
  if (auto slope = decaying_tail_slope(profile); slope && *slope <= -0.5) {
    const ShellStat* last = last_live(profile);
    cert.certified = false;
    cert.margin = -last->min;
    cert.witness = last->argmin;
    cert.parameters["tail_slope"] = *slope;
    cert.note = "lower bound decays to zero along the tail";
    return;
  }
  if (auto choice = choose_threshold(profile, cert.audit)) {
    cert.certified = true;
    cert.parameters["c"] = choice->c;
    cert.parameters["R"] = choice->radius;
    cert.margin = choice->margin;
    return;
  }
  // Report the worst point of the outer half as the witness.
  const double half = cert.audit.inner + 0.5 * (cert.audit.outer - cert.audit.inner);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : profile)
    if (!s.empty && s.radius >= half && s.min < worst) {
      worst = s.min;
      cert.witness = s.argmin;
    }
  cert.certified = false;
  cert.margin = std::min(worst, -std::numeric_limits<double>::min());
  cert.note = "no positive threshold holds on the outer half of the audit domain";
}

std::optional<bool> degree_balance(double negative_degree, double positive_degree) {
  if (negative_degree > positive_degree) return true;
  if (negative_degree < positive_degree) return false;
  return std::nullopt;
}

// Degree of the dominant negative term of L U + |grad U|^2 for the family.
std::optional<double> drift_degree(const PotentialSpec& spec, const LyapunovFamily& family) {
  const auto p = spec.growth_degree();
  if (!p) return std::nullopt;
  return family.kind == LyapunovFamily::Kind::ExpAV ? 2.0 * *p - 2.0 : *p;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::QuadraticDrift: return "quadratic-drift";
    case ConditionKind::SetDrift: return "set-drift";
    case ConditionKind::KusuokaStroock: return "kusuoka-stroock";
    case ConditionKind::Radial: return "radial";
    case ConditionKind::GeneralizedRadial: return "generalized-radial";
    case ConditionKind::PhiWeighted: return "phi-weighted";
    case ConditionKind::WeightedGenerator: return "weighted-generator";
  }
  return "unknown";
}

double LyapunovCertificate::param(std::string_view name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) throw InputError("certificate has no parameter '" + std::string(name) + "'");
  return it->second;
}

std::string LyapunovFamily::name() const {
  return kind == Kind::ExpAV ? "exp(" + fmt_double(a) + "*V)" : "exp(" + fmt_double(a) + "*|x-x0|^2)";
}

LogJet log_jet(const LyapunovFamily& family, const JetValue& v, std::span<const double> x,
               std::span<const double> x0) {
  LogJet u;
  const int d = v.dim;
  if (family.kind == LyapunovFamily::Kind::ExpAV) {
    u.value = family.a * v.value;
    for (int k = 0; k < d; ++k) {
      u.gradient[k] = family.a * v.gradient[k];
      u.second[k] = family.a * v.hessian(k, k);
    }
    u.laplacian = family.a * v.laplacian;
  } else {
    u.value = family.a * dist2(x, x0);
    for (int k = 0; k < d; ++k) {
      u.gradient[k] = 2.0 * family.a * (x[k] - x0[k]);
      u.second[k] = 2.0 * family.a;
    }
    u.laplacian = 2.0 * family.a * d;
  }
  return u;
}

double drift_quantity(const PotentialSpec& spec, const LyapunovFamily& family, std::span<const double> x,
                      std::span<const double> x0) {
  const JetValue v = spec.jet(x);
  const LogJet u = log_jet(family, v, x, x0);
  double q = u.laplacian;
  for (int k = 0; k < v.dim; ++k) q += u.gradient[k] * (u.gradient[k] - v.gradient[k]);
  return q;
}

double generator_ratio(const PotentialSpec& spec, const LyapunovFamily& family, std::span<const double> x,
                       std::span<const double> x0) {
  const Jet v = spec.raw_jet(x);
  Jet exponent;
  if (family.kind == LyapunovFamily::Kind::ExpAV) {
    exponent = Jet::constant(family.a) * v;
  } else {
    Jet s = Jet::constant(0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const Jet dk = Jet::variable(x[k], static_cast<int>(k)) - Jet::constant(x0[k]);
      s = s + dk * dk;
    }
    exponent = Jet::constant(family.a) * s;
  }
  const double e = std::exp(exponent.v);
  const Jet w = chain(exponent, e, e, e);
  double lw = 0.0;
  for (int k = 0; k < spec.dim(); ++k) lw += w.hess(k, k) - v.g[k] * w.g[k];
  return lw / w.v;
}

double PowerLaw::operator()(double r) const { return coef * std::pow(r, exponent); }

double PhiFunction::operator()(double r) const { return a0 + a1 * std::pow(r, q); }

AxisWeights AxisWeights::expression(std::vector<PotentialSpec> per_axis) {
  if (per_axis.empty()) throw ParameterError("expression weights need one expression per axis");
  AxisWeights w(Kind::Expression);
  w.exprs_ = std::move(per_axis);
  return w;
}

std::string AxisWeights::name() const {
  switch (kind_) {
    case Kind::Unit: return "unit";
    case Kind::InverseQuadratic: return "1/(1+x_i^2)";
    case Kind::Expression: {
      std::string s;
      for (const auto& e : exprs_) s += (s.empty() ? "" : "; ") + e.source();
      return s;
    }
  }
  return "";
}

double AxisWeights::weight(std::span<const double> x, int axis) const {
  double w = 1.0;
  switch (kind_) {
    case Kind::Unit: break;
    case Kind::InverseQuadratic: w = 1.0 / (1.0 + x[axis] * x[axis]); break;
    case Kind::Expression:
      if (axis >= static_cast<int>(exprs_.size())) throw ParameterError("missing weight expression for an axis");
      w = exprs_[axis].value(x);
      break;
  }
  if (!(w > 0.0)) throw ParameterError("axis weight must be positive");
  return w;
}

double AxisWeights::derivative(std::span<const double> x, int axis) const {
  switch (kind_) {
    case Kind::Unit: return 0.0;
    case Kind::InverseQuadratic: {
      const double s = 1.0 + x[axis] * x[axis];
      return -2.0 * x[axis] / (s * s);
    }
    case Kind::Expression:
      if (axis >= static_cast<int>(exprs_.size())) throw ParameterError("missing weight expression for an axis");
      return exprs_[axis].raw_jet(x).g[axis];
  }
  return 0.0;
}

AxisWeight AxisWeights::as_axis_weight() const {
  if (kind_ == Kind::Unit) return {};
  return [self = *this](std::span<const double> x, int axis) { return self.weight(x, axis); };
}

LyapunovCertificate check_quadratic_drift(const PotentialSpec& spec, const LyapunovFamily& family, double c,
                                          std::span<const double> x0, const AuditDomain& audit) {
  validate_family(family);
  if (!(c > 0.0)) throw ParameterError("drift constant c must be positive");
  auto cert = make_certificate(ConditionKind::QuadraticDrift, "drift", spec, x0, audit);
  cert.family = family.name();
  const auto profile = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                     return drift_quantity(spec, family, x, x0) + c * dist2(x, x0);
                                   }));
  const UpperBound ub = drift_upper_bound(profile, audit);
  cert.parameters["a"] = family.a;
  cert.parameters["c"] = c;
  cert.certified = ub.bounded;
  cert.margin = ub.margin;
  if (ub.bounded) {
    cert.parameters["b"] = ub.b;
  } else {
    cert.witness = ub.witness;
    cert.note = "drift quantity keeps growing at the edge of the audit domain";
  }
  if (auto deg = drift_degree(spec, family)) cert.asymptotic_agrees = degree_balance(*deg, 2.0);
  return cert;
}

LyapunovCertificate check_set_drift(const PotentialSpec& spec, const LyapunovFamily& family, double lambda, double b,
                                    double r0, std::span<const double> x0, const AuditDomain& audit) {
  validate_family(family);
  if (!(lambda > 0.0) || !(b > 0.0) || !(r0 > 0.0)) throw ParameterError("set drift needs lambda, b, r0 > 0");
  auto cert = make_certificate(ConditionKind::SetDrift, "drift", spec, x0, audit);
  cert.family = family.name();
  cert.parameters = {{"a", family.a}, {"lambda", lambda}, {"b", b}, {"R", r0}};
  double margin = std::numeric_limits<double>::infinity();

  if (r0 < audit.outer) {
    AuditDomain outside = audit;
    outside.inner = std::max(r0, audit.inner);
    const auto prof = scan_shells(outside, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                    const double q = drift_quantity(spec, family, x, x0);
                                    return q + lambda - kRoundoff * (std::abs(q) + lambda);
                                  }));
    for (const auto& s : prof)
      if (!s.empty && -s.max < margin) {
        margin = -s.max;
        if (margin < 0.0) cert.witness = s.argmax;
      }
  } else {
    cert.note = "ball covers the audit domain; only the inner bound is audited";
  }
  if (r0 > audit.inner) {
    AuditDomain inside = audit;
    inside.outer = std::min(r0, audit.outer);
    const auto prof = scan_shells(inside, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                    const double q = drift_quantity(spec, family, x, x0);
                                    const JetValue v = spec.jet(x);
                                    const double w = std::exp(log_jet(family, v, x, x0).value);
                                    return w * (q + lambda) - kRoundoff * w * (std::abs(q) + lambda);
                                  }));
    for (const auto& s : prof)
      if (!s.empty && b - s.max < margin) {
        margin = b - s.max;
        if (margin < 0.0) cert.witness = s.argmax;
      }
  }
  if (!std::isfinite(margin)) throw InputError("set drift undefined on the whole audit domain");
  cert.margin = margin;
  cert.certified = margin >= 0.0;
  if (cert.certified) cert.witness.reset();
  return cert;
}

LyapunovCertificate set_drift_from_quadratic(const PotentialSpec& spec, const LyapunovFamily& family,
                                             const LyapunovCertificate& quadratic, double lambda) {
  if (quadratic.kind != ConditionKind::QuadraticDrift || !quadratic.certified)
    throw InputError("set drift reduction needs a certified quadratic drift");
  const double c = quadratic.param("c");
  const double b = quadratic.param("b");
  const double r0 = std::sqrt(std::max(b + lambda, 0.0) / c);
  const auto x0 = quadratic.base_point();

  AuditDomain ball = quadratic.audit;
  ball.outer = std::min(r0, quadratic.audit.outer);
  double wmax = 0.0;
  if (ball.outer > ball.inner) {
    const auto prof = scan_shells(ball, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                    return log_jet(family, spec.jet(x), x, x0).value;
                                  }));
    double umax = -std::numeric_limits<double>::infinity();
    for (const auto& s : prof)
      if (!s.empty) umax = std::max(umax, s.max);
    wmax = std::exp(umax);
  }
  const double bprime = std::max(b + lambda, 0.0) * std::max(wmax, 1.0) * (1.0 + 1e-6);
  auto cert = check_set_drift(spec, family, lambda, bprime, r0, x0, quadratic.audit);
  cert.parameters["c"] = c;
  cert.parameters["b_quadratic"] = b;
  return cert;
}

LyapunovCertificate check_kusuoka_stroock(const PotentialSpec& spec, double a, std::span<const double> x0,
                                          const AuditDomain& audit) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("Kusuoka-Stroock parameter a must lie in (0, 1)");
  auto cert = make_certificate(ConditionKind::KusuokaStroock, "gradient-laplacian", spec, x0, audit);
  cert.family = LyapunovFamily::exp_av(a).name();
  cert.parameters["a"] = a;
  const auto profile = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                     const double r2 = dist2(x, x0);
                                     if (r2 == 0.0) return kNaN;
                                     const JetValue v = spec.jet(x);
                                     return ((1.0 - a) * v.gradient.squaredNorm() - v.laplacian) / r2;
                                   }));
  fill_threshold(cert, profile);
  return cert;
}

LyapunovCertificate check_radial(const PotentialSpec& spec, const PowerLaw& beta, double shift,
                                 std::span<const double> x0, const AuditDomain& audit, RadialForm form) {
  const bool unit = form == RadialForm::UnitRadial;
  auto cert = make_certificate(unit ? ConditionKind::GeneralizedRadial : ConditionKind::Radial,
                               unit ? "unit-radial" : "inner-product", spec, x0, audit);
  cert.family = fmt_double(beta.coef) + "*r^" + fmt_double(beta.exponent);
  cert.parameters = {{"beta_coef", beta.coef}, {"beta_exponent", beta.exponent}, {"shift", shift}};

  // Radial derivative term: (x - x0).grad V, or its unit-direction version.
  auto radial = [&](std::span<const double> x) {
    const JetValue v = spec.jet(x);
    double ip = 0.0;
    for (int k = 0; k < spec.dim(); ++k) ip += (x[k] - x0[k]) * v.gradient[k];
    if (unit) {
      const double d = std::sqrt(dist2(x, x0));
      if (d == 0.0) return kNaN;
      ip /= d;
    }
    return ip;
  };
  const auto slack = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                   const double ip = radial(x);
                                   const double bt = beta(std::sqrt(dist2(x, x0)));
                                   return ip - bt + shift + kRoundoff * (std::abs(ip) + std::abs(bt) + std::abs(shift));
                                 }));
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& s : slack)
    if (!s.empty && s.min < margin) {
      margin = s.min;
      cert.witness = s.argmin;
    }
  if (!std::isfinite(margin)) throw InputError("radial condition undefined on the whole audit domain");
  // Best linear (unit form) or quadratic (inner-product form) lower envelope.
  const auto ratio = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                   const double d2 = dist2(x, x0);
                                   if (d2 == 0.0) return kNaN;
                                   return radial(x) / (unit ? std::sqrt(d2) : d2);
                                 }));
  double env = std::numeric_limits<double>::infinity();
  for (const auto& s : ratio)
    if (!s.empty) env = std::min(env, s.min);
  cert.parameters[unit ? "eta" : "c"] = env;
  cert.margin = margin;
  cert.certified = margin >= 0.0;
  if (cert.certified)
    cert.witness.reset();
  else
    cert.note = "radial derivative falls below the required profile";
  return cert;
}

LyapunovCertificate check_phi_weighted(const PotentialSpec& spec, const LyapunovFamily& family,
                                       const PhiFunction& phi, double c, std::span<const double> x0,
                                       const AuditDomain& audit) {
  if (!(phi(0.0) > 0.0)) throw ParameterError("Phi(0) must be positive");
  if (phi.a1 < 0.0 || phi.q < 0.0) throw ParameterError("Phi must be nondecreasing");
  if (!(c > 0.0)) throw ParameterError("drift constant c must be positive");
  if (!(family.a > 0.0)) throw ParameterError("Lyapunov family parameter a must be positive");
  auto cert = make_certificate(ConditionKind::PhiWeighted, "drift-and-curvature", spec, x0, audit);
  cert.family = family.name();
  cert.parameters = {{"a", family.a}, {"c", c}, {"phi0", phi(0.0)}, {"a0", phi.a0}, {"a1", phi.a1}, {"q", phi.q}};

  const auto drift = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                   const double d2 = dist2(x, x0);
                                   return drift_quantity(spec, family, x, x0) + c * d2 * phi(2.0 * std::sqrt(d2));
                                 }));
  const UpperBound ub = drift_upper_bound(drift, audit);

  const auto curv = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                  const double lm = min_hessian_eigenvalue(spec.jet(x));
                                  const double ph = phi(std::sqrt(dist2(x, x0)));
                                  return lm + ph + kRoundoff * (std::abs(lm) + ph);
                                }));
  double curv_margin = std::numeric_limits<double>::infinity();
  std::array<double, 3> curv_witness{};
  for (const auto& s : curv)
    if (!s.empty && s.min < curv_margin) {
      curv_margin = s.min;
      curv_witness = s.argmin;
    }
  if (!std::isfinite(curv_margin)) throw InputError("curvature undefined on the whole audit domain");

  cert.parameters["drift_margin"] = ub.margin;
  cert.parameters["curvature_margin"] = curv_margin;
  cert.margin = std::min(ub.margin, curv_margin);
  cert.certified = ub.bounded && curv_margin >= 0.0;
  if (ub.bounded) cert.parameters["b"] = ub.b;
  if (!ub.bounded) {
    cert.witness = ub.witness;
    cert.note = "drift quantity keeps growing at the edge of the audit domain";
  } else if (curv_margin < 0.0) {
    cert.witness = curv_witness;
    cert.note = "Hessian falls below -Phi(d)";
  }
  // Leading balance: V-driven decay versus c d^2 Phi(2d).
  if (auto deg = drift_degree(spec, family)) {
    const double phi_deg = phi.a1 > 0.0 ? phi.q : 0.0;
    cert.asymptotic_agrees = degree_balance(*deg, 2.0 + phi_deg);
  }
  return cert;
}

PhiFunction fit_phi(const PotentialSpec& spec, std::span<const double> x0, const AuditDomain& audit, double q,
                    double a0) {
  if (!(a0 > 0.0) || q < 0.0) throw ParameterError("Phi fit needs a0 > 0 and q >= 0");
  const auto prof = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                  return -min_hessian_eigenvalue(spec.jet(x)) - a0;
                                }));
  double a1 = 0.0;
  for (const auto& s : prof) {
    if (s.empty || s.max <= 0.0) continue;
    const double rq = std::pow(s.radius, q);
    if (rq <= 0.0) throw ParameterError("a0 does not cover the curvature deficit at the base point");
    a1 = std::max(a1, s.max / rq);
  }
  return {a0, a1 * 1.01, q};
}

namespace {

double weighted_drift(const PotentialSpec& spec, const AxisWeights& omega, const LyapunovFamily& family,
                      std::span<const double> x, std::span<const double> x0, double* w_out) {
  const JetValue v = spec.jet(x);
  const LogJet u = log_jet(family, v, x, x0);
  double q = 0.0;
  for (int i = 0; i < spec.dim(); ++i) {
    const double w = omega.weight(x, i);
    q += w * (u.second[i] + u.gradient[i] * u.gradient[i]) + (omega.derivative(x, i) - w * v.gradient[i]) * u.gradient[i];
  }
  if (w_out) *w_out = std::exp(u.value);
  return q;
}

}  // namespace

LyapunovCertificate check_weighted_generator(const PotentialSpec& spec, const AxisWeights& omega,
                                             const LyapunovFamily& family, double radius,
                                             std::span<const double> x0, const AuditDomain& audit) {
  validate_family(family);
  auto cert = make_certificate(ConditionKind::WeightedGenerator, "drift", spec, x0, audit);
  cert.family = family.name() + " with weights " + omega.name();
  cert.parameters["a"] = family.a;

  const auto prof = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                  return weighted_drift(spec, omega, family, x, x0, nullptr);
                                }));
  // Suffix maxima of the drift over shells.
  std::vector<double> tail(prof.size() + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t j = prof.size(); j-- > 0;)
    tail[j] = std::max(tail[j + 1], prof[j].empty ? tail[j + 1] : prof[j].max);

  std::optional<std::size_t> start;
  if (radius > 0.0) {
    for (std::size_t j = 0; j < prof.size(); ++j)
      if (prof[j].radius >= radius - 1e-12) {
        start = j;
        break;
      }
  } else {
    const double limit = audit.inner + 0.5 * (audit.outer - audit.inner) + 1e-12;
    for (std::size_t j = 0; j < prof.size() && prof[j].radius <= limit; ++j)
      if (tail[j] < 0.0) {
        start = j;
        break;
      }
  }
  if (!start || !(tail[*start] < 0.0)) {
    const ShellStat* last = last_live(prof);
    cert.certified = false;
    cert.margin = last ? -last->max : -1.0;
    if (last) cert.witness = last->argmax;
    cert.note = "weighted generator drift is not negative outside any admissible ball";
    if (radius > 0.0) cert.parameters["R"] = radius;
    return cert;
  }
  const double r = prof[*start].radius;
  const double lambda = -tail[*start] * (1.0 - 1e-6);

  double bmax = 0.0;
  double eps_ball = std::numeric_limits<double>::infinity();
  if (r > audit.inner) {
    AuditDomain ball = audit;
    ball.outer = r;
    const auto inside = scan_shells(ball, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                      double w = 1.0;
                                      const double q = weighted_drift(spec, omega, family, x, x0, &w);
                                      return w * (q + lambda);
                                    }));
    for (const auto& s : inside)
      if (!s.empty) bmax = std::max(bmax, s.max);
    const auto weights = scan_shells(ball, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                       double m = std::numeric_limits<double>::infinity();
                                       for (int i = 0; i < spec.dim(); ++i) m = std::min(m, omega.weight(x, i));
                                       return m;
                                     }));
    for (const auto& s : weights)
      if (!s.empty) eps_ball = std::min(eps_ball, s.min);
  }
  const double b = bmax * (1.0 + 1e-6) + 1e-12;
  cert.parameters["lambda"] = lambda;
  cert.parameters["b"] = b;
  cert.parameters["R"] = r;
  if (std::isfinite(eps_ball)) cert.parameters["omega_min_ball"] = eps_ball;
  cert.margin = std::min(-tail[*start] - lambda, b - bmax);
  cert.certified = true;
  return cert;
}

LyapunovCertificate check_weighted_kusuoka_stroock(const PotentialSpec& spec, const AxisWeights& omega, double a,
                                                   std::span<const double> x0, const AuditDomain& audit) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("Kusuoka-Stroock parameter a must lie in (0, 1)");
  auto cert = make_certificate(ConditionKind::WeightedGenerator, "weighted-kusuoka-stroock", spec, x0, audit);
  cert.family = LyapunovFamily::exp_av(a).name() + " with weights " + omega.name();
  cert.parameters["a"] = a;
  const auto profile = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                     const JetValue v = spec.jet(x);
                                     double s = 0.0;
                                     for (int i = 0; i < spec.dim(); ++i) {
                                       const double w = omega.weight(x, i);
                                       const double g = v.gradient[i];
                                       s += (1.0 - a) * w * g * g - omega.derivative(x, i) * g - w * v.hessian(i, i);
                                     }
                                     return s;
                                   }));
  fill_threshold(cert, profile);
  return cert;
}

double inverse_weight_radial_sum(const PotentialSpec& spec, std::span<const double> x) {
  const JetValue v = spec.jet(x);
  double s = 0.0;
  for (int i = 0; i < spec.dim(); ++i) {
    const double t = 1.0 + x[i] * x[i];
    s += x[i] * v.gradient[i] / t - (1.0 - x[i] * x[i]) / (t * t);
  }
  return s;
}

LyapunovCertificate check_inverse_weight_radial(const PotentialSpec& spec, std::span<const double> x0,
                                                const AuditDomain& audit) {
  auto cert = make_certificate(ConditionKind::WeightedGenerator, "inverse-weight-radial", spec, x0, audit);
  cert.family = "exp(a*|x|^2), a small, with weights 1/(1+x_i^2)";
  const auto profile = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                                     return inverse_weight_radial_sum(spec, x);
                                   }));
  fill_threshold(cert, profile);
  return cert;
}

double min_hessian_eigenvalue(const JetValue& j) {
  if (j.dim == 1) return j.hessian(0, 0);
  if (j.dim == 2) {
    const double a = j.hessian(0, 0), b = j.hessian(0, 1), c = j.hessian(1, 1);
    return 0.5 * (a + c) - std::hypot(0.5 * (a - c), b);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(j.hessian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

CurvatureBound curvature_bound(const PotentialSpec& spec, std::span<const double> x0, const AuditDomain& audit) {
  CurvatureBound out;
  out.profile = scan_shells(audit, x0, spec.dim(), guarded([&](std::span<const double> x) {
                              return min_hessian_eigenvalue(spec.jet(x));
                            }));
  out.K = std::numeric_limits<double>::infinity();
  for (const auto& s : out.profile)
    if (!s.empty && s.min < out.K) {
      out.K = s.min;
      out.argmin = s.argmin;
    }
  if (!std::isfinite(out.K)) throw InputError("Hessian undefined on the whole audit domain");
  return out;
}

std::vector<DirectionalCurvature> directional_curvature(const PotentialSpec& spec, std::span<const double> x0,
                                                        std::span<const double> direction,
                                                        const std::vector<double>& radii) {
  if (direction.size() != x0.size() || static_cast<int>(x0.size()) != spec.dim())
    throw InputError("direction dimension does not match the potential");
  double norm = 0.0;
  for (double u : direction) norm += u * u;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw InputError("zero direction");
  std::vector<DirectionalCurvature> out;
  out.reserve(radii.size());
  std::array<double, 3> p{};
  for (double r : radii) {
    for (std::size_t k = 0; k < x0.size(); ++k) p[k] = x0[k] + r * direction[k] / norm;
    const JetValue j = spec.jet(std::span<const double>(p.data(), x0.size()));
    out.push_back({r, min_hessian_eigenvalue(j), 0.5 * j.laplacian});
  }
  return out;
}

}  // namespace ineqcert
