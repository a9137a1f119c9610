#include "ineqcert/transport.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ineqcert/error.hpp"
#include "ineqcert/parallel.hpp"

namespace ineqcert {
namespace {

double ground_cost(std::span<const double> x, std::span<const double> y, int p) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return p == 2 ? s : std::sqrt(s);
}

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  if (p != 1 && p != 2) throw InputError("only W_1 and W_2 are supported");
  if (mu.dim != nu.dim) throw InputError("measures live in different dimensions");
  mu.validate();
  nu.validate();
}

// Lower envelope of parabolas: out[p] = min_q f[q] + s (p - q)^2.
void min_plus_1d(const double* f, double* out, std::size_t n, std::size_t stride, double s, std::vector<double>& buf,
                 std::vector<std::size_t>& v, std::vector<double>& z) {
  buf.resize(n);
  v.resize(n);
  z.resize(n + 1);
  for (std::size_t q = 0; q < n; ++q) buf[q] = f[q * stride];
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double x;
    while (true) {
      const double vq = static_cast<double>(v[k]);
      const double qq = static_cast<double>(q);
      x = ((buf[q] + s * qq * qq) - (buf[v[k]] + s * vq * vq)) / (2.0 * s * (qq - vq));
      if (x <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (x <= z[k]) {
      // Only possible for k == 0: the new parabola dominates everywhere.
      v[0] = q;
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = x;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::size_t p = 0; p < n; ++p) {
    while (z[k + 1] < static_cast<double>(p)) ++k;
    const double d = static_cast<double>(p) - static_cast<double>(v[k]);
    out[p * stride] = buf[v[k]] + s * d * d;
  }
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (dim < 1 || weights.empty() || points.size() != weights.size() * static_cast<std::size_t>(dim))
    throw InputError("discrete measure has inconsistent support and weights");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("discrete measure has a negative or non-finite weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InputError("discrete measure weights do not sum to 1");
}

DiscreteMeasure DiscreteMeasure::dirac(std::span<const double> x) {
  DiscreteMeasure m;
  m.dim = static_cast<int>(x.size());
  m.points.assign(x.begin(), x.end());
  m.weights = {1.0};
  return m;
}

DiscreteMeasure DiscreteMeasure::from_grid(const GridMeasure& mu, const DensityFunction* density, double cutoff) {
  DiscreteMeasure m;
  m.dim = mu.dim();
  const auto& w = mu.weights();
  std::vector<double> kept;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double wi = density ? density->values[i] * w[i] : w[i];
    if (wi <= cutoff || wi <= 0.0) continue;
    const auto x = mu.node(i);
    m.points.insert(m.points.end(), x.begin(), x.end());
    kept.push_back(wi);
  }
  if (kept.empty()) throw InputError("no grid mass above the cutoff");
  const double total = pairwise_sum(kept);
  for (double& wi : kept) wi /= total;
  m.weights = std::move(kept);
  return m;
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(rows, 0.0);
  for (const auto& e : entries) s[e.i] += e.mass;
  return s;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> s(cols, 0.0);
  for (const auto& e : entries) s[e.j] += e.mass;
  return s;
}

ExactTransport wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  check_pair(mu, nu, p);
  const CostFunction cost = [&](std::size_t i, std::size_t j) { return ground_cost(mu.point(i), nu.point(j), p); };
  const TransportSolution sol = solve_transportation(mu.weights, nu.weights, cost);

  ExactTransport out;
  out.pivots = sol.pivots;
  out.u = sol.u;
  out.v = sol.v;
  out.plan.rows = mu.size();
  out.plan.cols = nu.size();
  for (const auto& e : sol.basis)
    if (e.mass > 0.0) out.plan.entries.push_back(e);
  out.plan.cost = std::max(sol.primal, 0.0);
  out.duality_gap = std::abs(sol.primal - sol.dual);
  double worst = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) worst = std::min(worst, cost(i, j) - sol.u[i] - sol.v[j]);
  out.min_reduced_cost = worst;
  out.distance = std::pow(out.plan.cost, 1.0 / p);
  return out;
}

SinkhornTransport wasserstein_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p, double epsilon,
                                       int max_iterations, double tolerance) {
  check_pair(mu, nu, p);
  if (!(epsilon > 0.0)) throw ParameterError("Sinkhorn regularization must be positive");
  // Zero-weight atoms carry no mass and would put -inf into the potentials.
  std::vector<std::size_t> ri, ci;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.weights[i] > 0.0) ri.push_back(i);
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (nu.weights[j] > 0.0) ci.push_back(j);
  const std::size_t m = ri.size(), n = ci.size();
  std::vector<double> a(m), b(n), la(m), lb(n), cost(m * n);
  for (std::size_t i = 0; i < m; ++i) la[i] = std::log(a[i] = mu.weights[ri[i]]);
  for (std::size_t j = 0; j < n; ++j) lb[j] = std::log(b[j] = nu.weights[ci[j]]);
  double cmax = 0.0, cmean = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = ground_cost(mu.point(ri[i]), nu.point(ci[j]), p);
      cmax = std::max(cmax, cost[i * n + j]);
      cmean += a[i] * b[j] * cost[i * n + j];
    }

  SinkhornTransport out;
  std::vector<double> P(m * n);
  if (cmax == 0.0) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) P[i * n + j] = a[i] * b[j];
    out.converged = true;
  } else {
    // Log-domain potentials with eps-scaling; within a stage the scaling
    // vectors u, v iterate on a frozen kernel and are absorbed into f, g
    // whenever they grow large.
    std::vector<double> f(m, 0.0), g(n, 0.0), u(m), v(n), K(m * n);
    const double target = epsilon * cmean;
    double eps = std::max(target, cmax);
    int it = 0;
    auto absorb = [&] {
      for (std::size_t i = 0; i < m; ++i) f[i] += eps * std::log(u[i]);
      for (std::size_t j = 0; j < n; ++j) g[j] += eps * std::log(v[j]);
    };
    auto rebuild = [&] {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) K[i * n + j] = std::exp((f[i] + g[j] - cost[i * n + j]) / eps);
      std::fill(u.begin(), u.end(), 1.0);
      std::fill(v.begin(), v.end(), 1.0);
    };
    auto row_error = [&] {
      double err = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += K[i * n + j] * v[j];
        err += std::abs(u[i] * s - a[i]);
      }
      return err;
    };
    while (true) {
      const bool last_stage = eps <= target;
      const double stage_tol = last_stage ? tolerance : std::max(tolerance, 1e-4);
      const int stage_cap = last_stage ? max_iterations : std::min(max_iterations, 2000);
      int stage_it = 0;
      rebuild();
      while (stage_it < stage_cap && it < max_iterations) {
        for (std::size_t i = 0; i < m; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += K[i * n + j] * v[j];
          u[i] = a[i] / s;
        }
        for (std::size_t j = 0; j < n; ++j) v[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) v[j] += K[i * n + j] * u[i];
        for (std::size_t j = 0; j < n; ++j) v[j] = b[j] / v[j];
        ++it;
        ++stage_it;
        bool large = false;
        for (double x : u) large = large || !(std::abs(std::log(x)) < 50.0);
        for (double x : v) large = large || !(std::abs(std::log(x)) < 50.0);
        if (large) {
          absorb();
          rebuild();
          continue;
        }
        // Columns are exact after the v update; rows carry the error.
        if (stage_it % 10 == 0) {
          out.marginal_error = row_error();
          if (out.marginal_error <= stage_tol) break;
        }
      }
      absorb();
      rebuild();
      out.marginal_error = row_error();
      if (last_stage) {
        out.converged = out.marginal_error <= tolerance;
        break;
      }
      if (it >= max_iterations) break;
      eps = std::max(target, 0.5 * eps);
    }
    out.iterations = it;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) P[i * n + j] = K[i * n + j];
  }

  // Round onto the coupling polytope: shrink rows, shrink columns, then
  // distribute the remaining deficits as a rank-one correction.
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += P[i * n + j];
    const double scale = s > a[i] ? a[i] / s : 1.0;
    for (std::size_t j = 0; j < n; ++j) P[i * n + j] *= scale;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += P[i * n + j];
    const double scale = s > b[j] ? b[j] / s : 1.0;
    for (std::size_t i = 0; i < m; ++i) P[i * n + j] *= scale;
  }
  std::vector<double> er(m), ec(n);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += P[i * n + j];
    er[i] = std::max(0.0, a[i] - s);
    total += er[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += P[i * n + j];
    ec[j] = std::max(0.0, b[j] - s);
  }
  if (total > 0.0)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) P[i * n + j] += er[i] * ec[j] / total;

  out.plan.rows = mu.size();
  out.plan.cols = nu.size();
  double c = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double mass = P[i * n + j];
      if (!(mass > 0.0)) continue;
      out.plan.entries.push_back({ri[i], ci[j], mass});
      c += mass * cost[i * n + j];
    }
  out.plan.cost = c;
  out.distance = std::pow(c, 1.0 / p);
  return out;
}

std::vector<double> hopf_lax(std::span<const double> f, double t, const GridMeasure& mu) {
  if (!(t > 0.0)) throw ParameterError("Hopf-Lax time must be positive");
  if (f.size() != mu.size()) throw InputError("function does not match the grid");
  for (double v : f)
    if (!std::isfinite(v)) throw InputError("Hopf-Lax input must be finite");
  const std::size_t n = static_cast<std::size_t>(mu.resolution());
  const double s = mu.spacing() * mu.spacing() / (2.0 * t);
  std::vector<double> cur(f.begin(), f.end());
  std::vector<double> next(cur.size());
  for (int axis = 0; axis < mu.dim(); ++axis) {
    const std::size_t stride = mu.stride(axis);
    const std::size_t lines = cur.size() / n;
    parallel_for(lines, [&](std::size_t begin, std::size_t end) {
      std::vector<double> buf, z;
      std::vector<std::size_t> v;
      for (std::size_t line = begin; line < end; ++line) {
        // Base index of the line: all axes except `axis` fixed.
        const std::size_t lo = line % stride;
        const std::size_t hi = line / stride;
        const std::size_t base = hi * stride * n + lo;
        min_plus_1d(cur.data() + base, next.data() + base, n, stride, s, buf, v, z);
      }
    });
    cur.swap(next);
  }
  return cur;
}

BobkovGotzeResult bobkov_gotze_test(const GridMeasure& mu, std::span<const double> f, double C, double tolerance) {
  if (!(C > 0.0)) throw ParameterError("Bobkov-Gotze constant must be positive");
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  if (std::abs(moment(mu, f)) > 1e-10 * scale) throw InputError("Bobkov-Gotze test needs a mu-centered function");
  const auto q = hopf_lax(f, 0.5, mu);
  std::vector<double> e(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) e[i] = std::exp(q[i] / (2.0 * C));
  BobkovGotzeResult out;
  out.value = moment(mu, e);
  out.tolerance = tolerance;
  out.pass = out.value <= 1.0 + tolerance;
  return out;
}

void write_plan_csv(std::ostream& os, const TransportPlan& plan) {
  os << "i,j,mass\n";
  os.precision(17);
  for (const auto& e : plan.entries) os << e.i << ',' << e.j << ',' << e.mass << '\n';
}

void write_measure_csv(std::ostream& os, const DiscreteMeasure& m) {
  for (int k = 0; k < m.dim; ++k) os << 'x' << (k + 1) << ',';
  os << "weight\n";
  os.precision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double c : m.point(i)) os << c << ',';
    os << m.weights[i] << '\n';
  }
}

DiscreteMeasure read_measure_csv(std::istream& is) {
  DiscreteMeasure m;
  m.dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (m.weights.empty() && m.dim == 0) continue;  // header
      throw InputError("non-numeric entry on line " + std::to_string(lineno));
    }
    if (row.size() < 2) throw InputError("measure rows need coordinates and a weight");
    const int d = static_cast<int>(row.size()) - 1;
    if (m.dim == 0) m.dim = d;
    if (d != m.dim) throw InputError("inconsistent column count on line " + std::to_string(lineno));
    m.points.insert(m.points.end(), row.begin(), row.end() - 1);
    m.weights.push_back(row.back());
  }
  if (m.weights.empty()) throw InputError("measure file has no rows");
  double s = 0.0;
  for (double w : m.weights) s += w;
  if (std::abs(s - 1.0) > 1e-6) throw InputError("measure weights sum to " + std::to_string(s) + ", not 1");
  for (double& w : m.weights) w /= s;
  m.validate();
  return m;
}

}  // namespace ineqcert
