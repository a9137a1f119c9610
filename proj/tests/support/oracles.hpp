#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ineqcert/transport.hpp"

namespace ineqcert::testing {

inline double ground_cost(const DiscreteMeasure& a, std::size_t i, const DiscreteMeasure& b, std::size_t j, int p) {
  double s = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    const double d = a.points[i * a.dim + k] - b.points[j * b.dim + k];
    s += d * d;
  }
  return std::pow(std::sqrt(s), p);
}

// Minimum cost over every basic feasible solution: each support of size
// m + n - 1 whose marginal system has full column rank is solved directly.
inline double brute_force_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, int p) {
  const std::size_t m = a.size(), n = b.size(), cells = m * n, k = m + n - 1;
  Eigen::MatrixXd A(m + n, cells);
  A.setZero();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      A(i, i * n + j) = 1.0;
      A(m + j, i * n + j) = 1.0;
    }
  Eigen::VectorXd rhs(m + n);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = a.weights[i];
  for (std::size_t j = 0; j < n; ++j) rhs[m + j] = b.weights[j];
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> pick(cells, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(k, cells)), true);
  do {
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < cells; ++c)
      if (pick[c]) support.push_back(c);
    Eigen::MatrixXd S(m + n, support.size());
    for (std::size_t s = 0; s < support.size(); ++s) S.col(static_cast<Eigen::Index>(s)) = A.col(support[s]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
    if (qr.rank() != static_cast<Eigen::Index>(support.size())) continue;
    const Eigen::VectorXd x = qr.solve(rhs);
    if ((S * x - rhs).norm() > 1e-12 || x.minCoeff() < -1e-13) continue;
    double cost = 0.0;
    for (std::size_t s = 0; s < support.size(); ++s)
      cost += x[static_cast<Eigen::Index>(s)] * ground_cost(a, support[s] / n, b, support[s] % n, p);
    best = std::min(best, cost);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// W_p^p on the line from the monotone (quantile) coupling.
inline double quantile_cost_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, int p) {
  std::vector<std::size_t> ia(a.size()), ib(b.size());
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::sort(ia.begin(), ia.end(), [&](auto x, auto y) { return a.points[x] < a.points[y]; });
  std::sort(ib.begin(), ib.end(), [&](auto x, auto y) { return b.points[x] < b.points[y]; });
  std::size_t i = 0, j = 0;
  double ra = a.weights[ia[0]], rb = b.weights[ib[0]], cost = 0.0;
  while (i < ia.size() && j < ib.size()) {
    const double q = std::min(ra, rb);
    cost += q * std::pow(std::abs(a.points[ia[i]] - b.points[ib[j]]), p);
    ra -= q;
    rb -= q;
    if (ra <= 1e-15 && ++i < ia.size()) ra = a.weights[ia[i]];
    if (rb <= 1e-15 && ++j < ib.size()) rb = b.weights[ib[j]];
  }
  return cost;
}

inline DiscreteMeasure random_measure(std::mt19937_64& rng, int dim, std::size_t atoms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure m;
  m.dim = dim;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    for (int k = 0; k < dim; ++k) m.points.push_back(u(rng));
    m.weights.push_back(0.1 + u(rng));
    total += m.weights.back();
  }
  for (double& w : m.weights) w /= total;
  return m;
}

}  // namespace ineqcert::testing
