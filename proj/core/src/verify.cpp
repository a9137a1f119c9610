#include "ineqcert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ineqcert/error.hpp"
#include "ineqcert/parallel.hpp"
#include "ineqcert/spectral.hpp"

namespace ineqcert {
namespace {

// Grid atoms lighter than this are dropped before exact transport.
constexpr double kTransportCutoff = 1e-14;

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(std::mt19937_64& rng) {
  const double u = std::max(u01(rng), 1e-300);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * u01(rng));
}

std::array<double, 3> spread(const GridMeasure& mu) {
  std::array<double, 3> sd{1.0, 1.0, 1.0};
  for (int k = 0; k < mu.dim(); ++k) {
    const double m = moment(mu, [k](std::span<const double> x) { return x[k]; });
    const double v = moment(mu, [k, m](std::span<const double> x) { return (x[k] - m) * (x[k] - m); });
    sd[k] = std::sqrt(std::max(v, 1e-12));
  }
  return sd;
}

double transport_cost(const GridMeasure& mu, const DensityFunction& nu, int p) {
  const auto a = DiscreteMeasure::from_grid(mu, nullptr, kTransportCutoff);
  const auto b = DiscreteMeasure::from_grid(mu, &nu, kTransportCutoff);
  return wasserstein_exact(a, b, p).plan.cost;
}

std::string vec_label(std::string_view name, std::span<const double> v) {
  std::ostringstream os;
  os.precision(4);
  os << name << "(";
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  os << ")";
  return os.str();
}

// Coordinate ascent on a parameter vector with step halving.
template <typename F>
double coordinate_ascent(std::vector<double>& params, std::vector<double> steps, int budget, int& evaluations,
                         F objective, double best) {
  while (evaluations < budget) {
    bool improved = false;
    for (std::size_t k = 0; k < params.size() && evaluations < budget; ++k)
      for (double sign : {1.0, -1.0}) {
        if (evaluations >= budget) break;
        std::vector<double> trial = params;
        trial[k] += sign * steps[k];
        const double v = objective(trial);
        ++evaluations;
        if (v > best) {
          best = v;
          params = trial;
          improved = true;
          break;
        }
      }
    if (!improved) {
      for (double& s : steps) s *= 0.5;
      if (*std::max_element(steps.begin(), steps.end()) < 1e-3) break;
    }
  }
  return best;
}

}  // namespace

std::string to_string(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::W2hRatio: return "w2h_ratio";
    case EstimateKind::LsiRayleigh: return "lsi_rayleigh";
    case EstimateKind::PoincareRayleigh: return "poincare_rayleigh";
    case EstimateKind::WeightedPoincareRayleigh: return "weighted_poincare_rayleigh";
  }
  return "unknown";
}

std::vector<TestFunction> random_smooth_functions(const GridMeasure& mu, int count, std::uint64_t seed,
                                                  int features) {
  std::mt19937_64 rng(seed);
  const auto sd = spread(mu);
  const auto x0 = mu.base_point();
  std::vector<TestFunction> out;
  for (int c = 0; c < count; ++c) {
    std::vector<double> amp(features), phase(features), freq(static_cast<std::size_t>(features) * mu.dim());
    for (int f = 0; f < features; ++f) {
      amp[f] = normal(rng) / std::sqrt(static_cast<double>(features));
      phase[f] = 2.0 * std::numbers::pi * u01(rng);
      for (int k = 0; k < mu.dim(); ++k) freq[f * mu.dim() + k] = normal(rng) / sd[k];
    }
    TestFunction t;
    t.label = "fourier#" + std::to_string(c);
    t.values.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto x = mu.node(i);
      double s = 0.0;
      for (int f = 0; f < features; ++f) {
        double arg = phase[f];
        for (int k = 0; k < mu.dim(); ++k) arg += freq[f * mu.dim() + k] * (x[k] - x0[k]);
        s += amp[f] * std::cos(arg);
      }
      t.values[i] = s;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TestFunction> linear_functions(const GridMeasure& mu, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto x0 = mu.base_point();
  std::vector<TestFunction> out;
  for (int c = 0; c < count; ++c) {
    std::array<double, 3> u{};
    double norm = 0.0;
    for (int k = 0; k < mu.dim(); ++k) {
      u[k] = mu.dim() == 1 ? (c % 2 ? -1.0 : 1.0) : normal(rng);
      norm += u[k] * u[k];
    }
    norm = std::sqrt(norm);
    TestFunction t;
    t.label = "linear#" + std::to_string(c);
    t.values.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto x = mu.node(i);
      double s = 0.0;
      for (int k = 0; k < mu.dim(); ++k) s += u[k] / norm * (x[k] - x0[k]);
      t.values[i] = s;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TestMeasure> random_tilts(const GridMeasure& mu, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto smooth = random_smooth_functions(mu, (count + 1) / 2, seed ^ 0x51ed27u);
  const auto linear = linear_functions(mu, count / 2 + 1, seed ^ 0xa3c59u);
  const auto sd = spread(mu);
  double scale = 0.0;
  for (int k = 0; k < mu.dim(); ++k) scale = std::max(scale, sd[k]);
  std::vector<TestMeasure> out;
  for (int c = 0; c < count; ++c) {
    const double lambda = 0.2 + 1.3 * u01(rng);
    const TestFunction& f = c % 2 == 0 ? smooth[c / 2] : linear[c / 2];
    // Linear tilts are measured in units of the spread of mu.
    const double amp = c % 2 == 0 ? lambda : lambda / scale;
    std::vector<double> lh(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) lh[i] = amp * f.values[i];
    std::ostringstream os;
    os.precision(4);
    os << "tilt(" << f.label << ",lambda=" << amp << ")";
    out.push_back({os.str(), density_from_log(mu, lh)});
  }
  return out;
}

TestMeasure exponential_tilt(const GridMeasure& mu, std::span<const double> m) {
  if (static_cast<int>(m.size()) != mu.dim()) throw InputError("tilt vector dimension does not match the grid");
  const auto x0 = mu.base_point();
  std::vector<double> lh(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto x = mu.node(i);
    double s = 0.0;
    for (int k = 0; k < mu.dim(); ++k) s += m[k] * (x[k] - x0[k]);
    lh[i] = s;
  }
  return {vec_label("shift", m), density_from_log(mu, lh)};
}

double w2h_ratio(const GridMeasure& mu, const DensityFunction& nu) {
  const double H = relative_entropy(nu, mu);
  if (!(H > 1e-8)) return std::numeric_limits<double>::quiet_NaN();
  return transport_cost(mu, nu, 2) / (2.0 * H);
}

EmpiricalEstimate empirical_w2h(const GridMeasure& mu, W2hFamily family, int budget, std::uint64_t seed) {
  EmpiricalEstimate est;
  est.kind = EstimateKind::W2hRatio;
  est.seed = seed;
  est.resolution = mu.resolution();
  const double h_floor = 32.0 * mu.spacing() * mu.spacing();
  const auto sd = spread(mu);
  const int d = mu.dim();
  const auto x0 = mu.base_point();
  int evals = 0;
  double best = 0.0;
  std::vector<double> best_params;

  // Builds log h for a parameter vector; returns the ratio or -inf when skipped.
  std::function<std::vector<double>(const std::vector<double>&)> log_density;
  std::vector<double> steps;
  std::vector<std::vector<double>> seeds;
  std::vector<TestFunction> feats;
  std::string name;

  switch (family) {
    case W2hFamily::GaussianShifts: {
      name = "shift";
      log_density = [&](const std::vector<double>& m) {
        std::vector<double> lh(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const auto x = mu.node(i);
          double s = 0.0;
          for (int k = 0; k < d; ++k) s += m[k] * (x[k] - x0[k]);
          lh[i] = s;
        }
        return lh;
      };
      for (int k = 0; k < d; ++k)
        for (double s : {0.5, 1.0, 2.0}) {
          std::vector<double> m(d, 0.0);
          m[k] = s / sd[k];
          seeds.push_back(m);
        }
      steps.assign(d, 0.25);
      for (int k = 0; k < d; ++k) steps[k] /= sd[k];
      break;
    }
    case W2hFamily::ExponentialTilts: {
      name = "tilt";
      feats = random_smooth_functions(mu, 4, seed);
      // Parameters: one amplitude per feature.
      log_density = [&](const std::vector<double>& lam) {
        std::vector<double> lh(mu.size(), 0.0);
        for (std::size_t f = 0; f < feats.size(); ++f)
          for (std::size_t i = 0; i < mu.size(); ++i) lh[i] += lam[f] * feats[f].values[i];
        return lh;
      };
      for (std::size_t f = 0; f < feats.size(); ++f)
        for (double s : {0.5, 1.5}) {
          std::vector<double> lam(feats.size(), 0.0);
          lam[f] = s;
          seeds.push_back(lam);
        }
      steps.assign(feats.size(), 0.25);
      break;
    }
    case W2hFamily::TwoBumpMixtures: {
      name = "mixture";
      // Parameters (m1, m2, logit w) along the first axis.
      log_density = [&](const std::vector<double>& p) {
        const double w = 1.0 / (1.0 + std::exp(-p[2]));
        const double m1 = p[0], m2 = p[1];
        // Normalizers of exp(m x_1) mu, in log form for stability.
        std::vector<double> l1(mu.size()), l2(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const double t = mu.node(i)[0] - x0[0];
          l1[i] = m1 * t;
          l2[i] = m2 * t;
        }
        const auto n1 = density_from_log(mu, l1), n2 = density_from_log(mu, l2);
        std::vector<double> lh(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const double v = (1.0 - w) * n1.values[i] + w * n2.values[i];
          lh[i] = v > 0.0 ? std::log(v) : -745.0;
        }
        return lh;
      };
      const double s = 1.0 / sd[0];
      seeds = {{-s, s, 0.0}, {-2 * s, 2 * s, 0.0}, {0.5 * s, 2 * s, 0.0}, {-s, 2 * s, 1.0}};
      steps = {0.25 * s, 0.25 * s, 0.5};
      break;
    }
  }

  auto objective = [&](const std::vector<double>& p) {
    const auto nu = density_from_log(mu, log_density(p));
    const double H = relative_entropy(nu, mu);
    if (!(H > 1e-8) || H < h_floor) return -std::numeric_limits<double>::infinity();
    return transport_cost(mu, nu, 2) / (2.0 * H);
  };

  for (const auto& s : seeds) {
    if (evals >= budget) break;
    const double v = objective(s);
    ++evals;
    if (v > best || best_params.empty()) {
      best = std::max(best, v);
      best_params = s;
    }
  }
  if (!best_params.empty()) best = coordinate_ascent(best_params, steps, budget, evals, objective, best);
  est.value = std::max(best, 0.0);
  est.evaluations = evals;
  est.witness = vec_label(name, best_params);
  for (std::size_t k = 0; k < best_params.size(); ++k) est.witness_parameters["p" + std::to_string(k)] = best_params[k];
  return est;
}

double lsi_ratio(const GridMeasure& mu, std::span<const double> g) {
  const double e = dirichlet_form(mu, g);
  if (!(e > 0.0)) return 0.0;
  return entropy_of_square(mu, g) / (2.0 * e);
}

EmpiricalEstimate empirical_lsi(const GridMeasure& mu, int n_probes, std::uint64_t seed) {
  EmpiricalEstimate est;
  est.kind = EstimateKind::LsiRayleigh;
  est.seed = seed;
  est.resolution = mu.resolution();

  std::vector<TestFunction> probes = random_smooth_functions(mu, n_probes, seed);
  const auto lin = linear_functions(mu, std::max(2, 2 * mu.dim()), seed + 1);
  const auto sd = spread(mu);
  double scale = 0.0;
  for (int k = 0; k < mu.dim(); ++k) scale = std::max(scale, sd[k]);
  for (auto t : lin) {
    for (double& v : t.values) v /= scale;
    probes.push_back(std::move(t));
  }
  const std::size_t nf = probes.size();

  // Each probe f is scanned over exp(lambda f); evaluations run in parallel.
  const std::vector<double> lambdas{0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> vals(nf * lambdas.size(), 0.0);
  parallel_for(vals.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> g(mu.size());
    for (std::size_t k = begin; k < end; ++k) {
      const auto& f = probes[k / lambdas.size()].values;
      const double lam = lambdas[k % lambdas.size()];
      for (std::size_t i = 0; i < mu.size(); ++i) g[i] = std::exp(lam * f[i]);
      vals[k] = lsi_ratio(mu, g);
    }
  });
  int evals = static_cast<int>(vals.size());
  std::size_t arg = 0;
  for (std::size_t k = 1; k < vals.size(); ++k)
    if (vals[k] > vals[arg]) arg = k;
  double best = vals[arg];
  const std::size_t bf = arg / lambdas.size();
  std::vector<double> lam{lambdas[arg % lambdas.size()]};
  auto objective = [&](const std::vector<double>& p) {
    std::vector<double> g(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) g[i] = std::exp(p[0] * probes[bf].values[i]);
    return lsi_ratio(mu, g);
  };
  best = coordinate_ascent(lam, {0.25 * lam[0]}, evals + 24, evals, objective, best);
  est.witness = "exp(" + std::to_string(lam[0]) + "*" + probes[bf].label + ")";
  est.witness_parameters["lambda"] = lam[0];

  // Linearization along the leading spectral mode approaches the Poincare ratio.
  const SpectralEstimate mode = spectral_gap(mu);
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) g[i] = 1.0 + 1e-3 * mode.eigenvector[i];
  const double lin_ratio = lsi_ratio(mu, g);
  ++evals;
  if (lin_ratio > best) {
    best = lin_ratio;
    est.witness = "1+0.001*spectral_mode";
    est.witness_parameters = {{"epsilon", 1e-3}};
  }
  est.value = best;
  est.evaluations = evals;
  return est;
}

EmpiricalEstimate empirical_poincare(const GridMeasure& mu, const AxisWeights& omega) {
  EmpiricalEstimate est;
  est.kind = omega.kind() == AxisWeights::Kind::Unit ? EstimateKind::PoincareRayleigh
                                                     : EstimateKind::WeightedPoincareRayleigh;
  const SpectralEstimate s = spectral_gap(mu, omega.as_axis_weight());
  est.value = 1.0 / s.eigenvalue;
  est.resolution = mu.resolution();
  est.evaluations = s.iterations;
  est.witness = "leading eigenvector of the grid Dirichlet form";
  est.witness_parameters = {{"lambda_1", s.eigenvalue}};
  return est;
}

void CheckReport::add(std::string label, double lhs, double rhs) {
  CheckRow row{std::move(label), lhs, rhs, rhs + tolerance - lhs, true};
  row.pass = row.slack >= 0.0;
  if (rows.empty() || row.slack < worst_slack) worst_slack = row.slack;
  pass = pass && row.pass;
  rows.push_back(std::move(row));
}

CheckReport check_w1i(const GridMeasure& mu, double C_P, const std::vector<TestMeasure>& tests, const Tolerances& tol) {
  CheckReport r{"w1i", tol.w1i * mu.spacing(), {}, true, 0.0};
  for (const auto& t : tests) {
    const double w1 = transport_cost(mu, t.density, 1);
    r.add(t.label, w1 * w1, 4.0 * C_P * C_P * fisher_information(t.density, mu));
  }
  return r;
}

CheckReport check_hwi(const GridMeasure& mu, double K, const std::vector<TestMeasure>& tests, const Tolerances& tol) {
  if (K > 0.0) throw ParameterError("HWI is checked with K <= 0 only");
  CheckReport r{"hwi", tol.hwi * mu.spacing(), {}, true, 0.0};
  for (const auto& t : tests) {
    const double w2sq = transport_cost(mu, t.density, 2);
    const double H = relative_entropy(t.density, mu);
    const double I = fisher_information(t.density, mu);
    r.add(t.label, H, 2.0 * std::sqrt(I * w2sq) - 0.5 * K * w2sq);
  }
  return r;
}

CheckReport tv_transport_bound_check(const GridMeasure& mu, const std::vector<TestMeasure>& tests,
                                     const Tolerances& tol) {
  CheckReport r{"tv_transport", tol.tv * mu.spacing(), {}, true, 0.0};
  for (const auto& t : tests) {
    std::vector<double> f(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) f[i] = mu.distance_sq(i) * std::abs(t.density.values[i] - 1.0);
    r.add(t.label, transport_cost(mu, t.density, 2), 2.0 * moment(mu, f));
  }
  return r;
}

CheckReport check_phi_domination(const GridMeasure& mu, double c, double b, const std::vector<TestFunction>& g,
                                 const Tolerances& tol) {
  CheckReport r{"phi_domination", tol.domination * mu.spacing(), {}, true, 0.0};
  for (const auto& t : g) {
    std::vector<double> sq(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) sq[i] = t.values[i] * t.values[i];
    const double norm = moment(mu, sq);
    if (!(norm > 0.0)) continue;
    std::vector<double> phi_g(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) phi_g[i] = (c * mu.distance_sq(i) - b) * sq[i] / norm;
    r.add(t.label, moment(mu, phi_g), dirichlet_form(mu, t.values) / norm);
  }
  return r;
}

CheckReport check_restricted_lsi(const GridMeasure& mu, double C_P, const std::vector<TestFunction>& g,
                                 const Tolerances& tol) {
  CheckReport r{"restricted_lsi", tol.restricted_lsi * mu.spacing(), {}, true, 0.0};
  for (const auto& t : g) {
    std::vector<double> sq(mu.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      sq[i] = t.values[i] * t.values[i];
      sup = std::max(sup, sq[i]);
    }
    const double m = moment(mu, sq);
    if (!(m > 0.0)) continue;
    // Normalized so that mu(g^2) = 1; both sides scale the same way.
    const double ent = entropy_of_square(mu, t.values) / m;
    const double e = dirichlet_form(mu, t.values) / m;
    r.add(t.label, ent, 2.0 * C_P * (2.0 * std::numbers::ln2 + 0.5 * std::log(sup / m)) * e);
  }
  return r;
}

CheckReport check_bobkov_gotze(const GridMeasure& mu, double C, const std::vector<TestFunction>& f,
                               const Tolerances& tol) {
  CheckReport r{"bobkov_gotze", tol.bobkov_gotze * mu.spacing(), {}, true, 0.0};
  for (const auto& t : f) {
    const double m = moment(mu, t.values);
    std::vector<double> centered(t.values.size());
    for (std::size_t i = 0; i < centered.size(); ++i) centered[i] = t.values[i] - m;
    const auto res = bobkov_gotze_test(mu, centered, C, r.tolerance);
    r.add(t.label, res.value, 1.0);
  }
  return r;
}

MonotonicityReport lambda_monotonicity_probe(const GridMeasure& mu, std::span<const double> f, double eta_tilde,
                                             int points, const Tolerances& tol) {
  if (!(eta_tilde > 0.0)) throw ParameterError("eta_tilde must be positive");
  if (points < 2) throw ParameterError("monotonicity probe needs at least two lambda values");
  MonotonicityReport rep;
  rep.tolerance = tol.monotonicity * mu.spacing();
  std::vector<double> scaled(f.size()), e(f.size());
  for (int k = 1; k <= points; ++k) {
    const double lam = static_cast<double>(k) / points;
    for (std::size_t i = 0; i < f.size(); ++i) scaled[i] = lam * f[i];
    const auto q = hopf_lax(scaled, 0.5, mu);
    for (std::size_t i = 0; i < q.size(); ++i) e[i] = std::exp(eta_tilde * q[i]);
    rep.lambdas.push_back(lam);
    rep.G.push_back(moment(mu, e));
  }
  for (std::size_t k = 0; k + 1 < rep.G.size(); ++k) {
    if (!(rep.G[k] > 1.0 && rep.G[k + 1] > 1.0)) continue;
    const double q0 = std::log(rep.G[k]) / rep.lambdas[k];
    const double q1 = std::log(rep.G[k + 1]) / rep.lambdas[k + 1];
    rep.worst_increase = std::max(rep.worst_increase, q1 - q0);
  }
  rep.monotone = rep.worst_increase <= rep.tolerance;
  rep.endpoint_ok = rep.G.back() <= 1.0 + rep.tolerance;
  rep.pass = rep.monotone && rep.endpoint_ok;
  return rep;
}

SoundnessReport soundness_check(const InequalityCertificate& cert, const EmpiricalEstimate& estimate, double rel_tol) {
  const bool match = (cert.kind == InequalityKind::W2H && estimate.kind == EstimateKind::W2hRatio) ||
                     (cert.kind == InequalityKind::Lsi && estimate.kind == EstimateKind::LsiRayleigh) ||
                     (cert.kind == InequalityKind::Poincare && estimate.kind == EstimateKind::PoincareRayleigh) ||
                     (cert.kind == InequalityKind::WeightedPoincare &&
                      estimate.kind == EstimateKind::WeightedPoincareRayleigh);
  if (!match) throw InputError("estimate kind does not match the certificate kind");
  SoundnessReport rep;
  rep.certified = cert.constant;
  rep.empirical = estimate.value;
  try {
    rep.replay_ok = cert.replay() == cert.constant;
    if (!rep.replay_ok) rep.detail = "stated constant differs from its chain replay";
  } catch (const Error& e) {
    rep.detail = e.what();
  }
  rep.ordering_ok = estimate.value <= cert.constant * (1.0 + rel_tol);
  if (!rep.ordering_ok) rep.detail += (rep.detail.empty() ? "" : "; ") + std::string("empirical estimate exceeds the certified constant");
  return rep;
}

}  // namespace ineqcert
