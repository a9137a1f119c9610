#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ineqcert/certify.hpp"
#include "ineqcert/measure.hpp"
#include "ineqcert/transport.hpp"

namespace ineqcert {

enum class EstimateKind { W2hRatio, LsiRayleigh, PoincareRayleigh, WeightedPoincareRayleigh };

std::string to_string(EstimateKind kind);

/// Best ratio found by a search over a low-dimensional family.
struct EmpiricalEstimate {
  EstimateKind kind = EstimateKind::W2hRatio;
  double value = 0.0;
  /// Description of the maximizing test measure or function.
  std::string witness;
  NamedValues witness_parameters;
  std::uint64_t seed = 0;
  int resolution = 0;
  int evaluations = 0;
};

/// Tilted test measure nu = h mu on the grid.
struct TestMeasure {
  std::string label;
  DensityFunction density;
};

/// Smooth bounded test function on the grid nodes.
struct TestFunction {
  std::string label;
  std::vector<double> values;
};

/// Random smooth functions sum_k a_k cos(w_k . (x - x0) + phi_k) with
/// frequencies scaled to the spread of mu; deterministic in the seed.
std::vector<TestFunction> random_smooth_functions(const GridMeasure& mu, int count, std::uint64_t seed,
                                                  int features = 4);

/// Linear functions (x - x0) . u along random unit directions.
std::vector<TestFunction> linear_functions(const GridMeasure& mu, int count, std::uint64_t seed);

/// nu proportional to exp(lambda f) mu, with f from random_smooth_functions
/// or linear functions alternately and lambda in [0.2, 1.5].
std::vector<TestMeasure> random_tilts(const GridMeasure& mu, int count, std::uint64_t seed);

/// nu proportional to exp(m . (x - x0)) mu. For a standard Gaussian this is a
/// shift by m.
TestMeasure exponential_tilt(const GridMeasure& mu, std::span<const double> m);

enum class W2hFamily { GaussianShifts, ExponentialTilts, TwoBumpMixtures };

/// sup W_2^2(nu, mu) / (2 H(nu|mu)) over the family, refined by coordinate
/// ascent within `budget` evaluations. Candidates whose transport scale
/// sqrt(2H) falls below eight grid cells are skipped: on a lattice W_2^2 is
/// at least h W_1, so vanishing perturbations measure the grid, not mu.
EmpiricalEstimate empirical_w2h(const GridMeasure& mu, W2hFamily family, int budget, std::uint64_t seed = 1);

/// W_2^2(nu, mu) / (2 H(nu|mu)) for one test measure (exact LP on the grid).
double w2h_ratio(const GridMeasure& mu, const DensityFunction& nu);

/// sup Ent(g^2) / (2 E(g, g)) over exponentials of random smooth functions,
/// exponentials of linear functions and small perturbations 1 + eps f along
/// the leading spectral mode, with coordinate ascent on the amplitudes.
EmpiricalEstimate empirical_lsi(const GridMeasure& mu, int n_probes, std::uint64_t seed = 1);

/// Ent(g^2) / (2 E(g, g)) with the edge Dirichlet form.
double lsi_ratio(const GridMeasure& mu, std::span<const double> g);

/// Var(g) / E(g, g) maximized exactly by the grid spectral gap.
EmpiricalEstimate empirical_poincare(const GridMeasure& mu, const AxisWeights& omega = AxisWeights::unit());

struct CheckRow {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs + tolerance - lhs.
  double slack = 0.0;
  bool pass = true;
};

struct CheckReport {
  std::string name;
  double tolerance = 0.0;
  std::vector<CheckRow> rows;
  bool pass = true;
  double worst_slack = 0.0;

  void add(std::string label, double lhs, double rhs);
};

/// Tolerance C * spacing used by the pass/fail checks below.
struct Tolerances {
  double w1i = 0.5;
  double hwi = 0.5;
  double tv = 0.1;
  double bobkov_gotze = 0.1;
  double domination = 0.5;
  double restricted_lsi = 0.1;
  double monotonicity = 0.1;
};

/// W_1^2 <= 4 C_P^2 I(nu|mu).
CheckReport check_w1i(const GridMeasure& mu, double C_P, const std::vector<TestMeasure>& tests,
                      const Tolerances& tol = {});

/// H <= 2 sqrt(I) W_2 - (K/2) W_2^2 with K <= 0.
CheckReport check_hwi(const GridMeasure& mu, double K, const std::vector<TestMeasure>& tests,
                      const Tolerances& tol = {});

/// W_2^2(nu, mu) <= 2 sum d^2 |h - 1| w.
CheckReport tv_transport_bound_check(const GridMeasure& mu, const std::vector<TestMeasure>& tests,
                                     const Tolerances& tol = {});

/// int phi g^2 dmu <= E(g, g) with phi = c d^2 - b, on normalized g.
CheckReport check_phi_domination(const GridMeasure& mu, double c, double b, const std::vector<TestFunction>& g,
                                 const Tolerances& tol = {});

/// Ent(g^2) <= 2 C_P (2 log 2 + 1/2 log(|g^2|_inf / mu(g^2))) E(g, g).
CheckReport check_restricted_lsi(const GridMeasure& mu, double C_P, const std::vector<TestFunction>& g,
                                 const Tolerances& tol = {});

/// Bobkov-Gotze functional at constant C for each (recentered) function.
CheckReport check_bobkov_gotze(const GridMeasure& mu, double C, const std::vector<TestFunction>& f,
                               const Tolerances& tol = {});

struct MonotonicityReport {
  std::vector<double> lambdas;
  std::vector<double> G;
  /// Largest increase of lambda^{-1} log G between consecutive lambdas where G > 1.
  double worst_increase = 0.0;
  double tolerance = 0.0;
  bool monotone = true;
  bool endpoint_ok = true;
  bool pass = true;
};

/// G(lambda) = int exp(eta_tilde Q(lambda f)) dmu on a grid of lambda in (0, 1].
MonotonicityReport lambda_monotonicity_probe(const GridMeasure& mu, std::span<const double> f, double eta_tilde,
                                             int points = 20, const Tolerances& tol = {});

struct ConcentrationOptions {
  int samples = 100000;
  std::uint64_t seed = 7;
  /// Half-space threshold t in A = {<u, x> <= t}; the empirical median when empty.
  std::optional<double> threshold;
  double r_max = 4.0;
  int r_points = 40;
  /// Minimum tail count for an r value to enter the fit.
  int min_tail = 25;
};

struct ConcentrationReport {
  int n = 1;
  double threshold = 0.0;
  double mass_A = 0.0;
  std::vector<double> r;
  std::vector<double> p_hat;
  /// Fit of -log(1 - p) = a (r - r0)^2 - log b.
  double a = 0.0;
  double b = 0.0;
  double r0 = 0.0;
  int fit_points = 0;
  bool wide_confidence = false;
};

/// Monte Carlo estimate of mu^{n}(A^r) for the half-space A along the
/// normalized all-ones direction of (R^d)^n.
ConcentrationReport concentration_probe(const GridMeasure& mu, int n, const ConcentrationOptions& options = {});

struct SoundnessReport {
  bool replay_ok = false;
  bool ordering_ok = false;
  double certified = 0.0;
  double empirical = 0.0;
  std::string detail;
  bool pass() const { return replay_ok && ordering_ok; }
};

/// Certified constant must replay from its chain and dominate the
/// empirical estimate (relative slack `rel_tol`).
SoundnessReport soundness_check(const InequalityCertificate& cert, const EmpiricalEstimate& estimate,
                                double rel_tol = 1e-9);

}  // namespace ineqcert
