#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ineqcert/measure.hpp"

namespace ineqcert {

/// Finitely supported probability measure in R^d.
struct DiscreteMeasure {
  int dim = 1;
  /// Row-major support points, `dim` coordinates each.
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  /// Throws InputError unless weights are nonnegative and sum to 1 within 1e-12.
  void validate() const;

  static DiscreteMeasure dirac(std::span<const double> x);
  /// Grid nodes with the weights of mu, or of h mu when a density is given.
  /// Nodes with weight below `cutoff` are dropped and the rest renormalized.
  static DiscreteMeasure from_grid(const GridMeasure& mu, const DensityFunction* density = nullptr,
                                   double cutoff = 0.0);
};

struct PlanEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

/// Sparse coupling between two discrete measures.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<PlanEntry> entries;
  /// sum mass * |x_i - y_j|^p.
  double cost = 0.0;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

/// Solution of the transportation LP min sum c_ij pi_ij over couplings of a and b.
struct TransportSolution {
  std::vector<PlanEntry> basis;
  std::vector<double> u;
  std::vector<double> v;
  double primal = 0.0;
  double dual = 0.0;
  std::size_t pivots = 0;
};

using CostFunction = std::function<double(std::size_t, std::size_t)>;

/// Primal network simplex on the bipartite transportation graph: northwest
/// corner start, block-search pricing and a strongly feasible leaving rule.
TransportSolution solve_transportation(std::span<const double> a, std::span<const double> b, const CostFunction& cost);

struct ExactTransport {
  double distance = 0.0;
  TransportPlan plan;
  std::vector<double> u;
  std::vector<double> v;
  /// |primal - dual|; optimality requires at most 1e-8 * cost.
  double duality_gap = 0.0;
  /// Most negative reduced cost c_ij - u_i - v_j.
  double min_reduced_cost = 0.0;
  std::size_t pivots = 0;
};

/// W_p for p in {1, 2}, with dual potentials for an optimality check.
ExactTransport wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p);

struct SinkhornTransport {
  double distance = 0.0;
  TransportPlan plan;
  int iterations = 0;
  bool converged = false;
  /// L1 marginal violation of the unrounded plan at the last iteration.
  double marginal_error = 0.0;
};

/// Stabilized Sinkhorn with epsilon scaling. `epsilon` is relative to the mean
/// cost under the product coupling, which makes it invariant to rescaling. The plan is rounded onto the coupling polytope
/// before its cost is reported, so the distance always bounds W_p from above.
SinkhornTransport wasserstein_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p, double epsilon,
                                       int max_iterations = 100000, double tolerance = 1e-9);

/// Q_t f(x) = min over grid nodes y of f(y) + |x - y|^2 / (2t), exact on the
/// grid and computed axis by axis with lower envelopes of parabolas.
std::vector<double> hopf_lax(std::span<const double> f, double t, const GridMeasure& mu);

struct BobkovGotzeResult {
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// sum exp(Q f / (2C)) w with Q = Q_{1/2}; passes iff value <= 1 + tolerance.
BobkovGotzeResult bobkov_gotze_test(const GridMeasure& mu, std::span<const double> f, double C,
                                    double tolerance = 1e-3);

void write_plan_csv(std::ostream& os, const TransportPlan& plan);
void write_measure_csv(std::ostream& os, const DiscreteMeasure& m);
/// Reads rows "coord_1,...,coord_d,weight"; a header line is skipped.
/// Weights are renormalized when they sum to within 1e-6 of 1.
DiscreteMeasure read_measure_csv(std::istream& is);

}  // namespace ineqcert
