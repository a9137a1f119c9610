#include "ineqcert/spectral.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ineqcert/error.hpp"

namespace ineqcert {
namespace {

// Nodes lighter than this carry no mass in double precision and would make the
// shifted operator singular.
constexpr double kActiveWeight = 1e-280;
constexpr int kBlock = 4;
constexpr double kShift = 1e-4;

// Removes the mu-mean of every column.
void deflate_constants(Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  const double total = w.sum();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = w.dot(x.col(c)) / total;
    x.col(c).array() -= mean;
  }
}

}  // namespace

SpectralEstimate spectral_gap(const GridMeasure& mu, const AxisWeight& axis_weights, int max_iterations,
                              double tolerance) {
  const auto& w = mu.weights();
  std::vector<Eigen::Index> active(mu.size(), -1);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (w[i] > kActiveWeight) {
      active[i] = static_cast<Eigen::Index>(nodes.size());
      nodes.push_back(i);
    }
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n < kBlock + 2) throw SolverError("too few weighted nodes for a spectral estimate");

  Eigen::VectorXd mass(n);
  for (Eigen::Index a = 0; a < n; ++a) mass[a] = w[nodes[a]];

  const double h2 = mu.spacing() * mu.spacing();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * mu.dim() + 1));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  std::array<double, 3> mid{};
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::size_t i = nodes[a];
    for (int k = 0; k < mu.dim(); ++k) {
      if (mu.axis_index(i, k) == mu.resolution() - 1) continue;
      const std::size_t j = i + mu.stride(k);
      const Eigen::Index b = active[j];
      if (b < 0) continue;
      double we = std::sqrt(w[i] * w[j]) / h2;
      if (axis_weights) {
        for (int q = 0; q < mu.dim(); ++q) mid[q] = 0.5 * (mu.coordinate(i, q) + mu.coordinate(j, q));
        const double om = axis_weights(std::span<const double>(mid.data(), static_cast<std::size_t>(mu.dim())), k);
        if (!(om > 0.0)) throw ParameterError("axis weights must be positive");
        we *= om;
      }
      diag[a] += we;
      diag[b] += we;
      trip.emplace_back(a, b, -we);
      trip.emplace_back(b, a, -we);
    }
  }
  Eigen::SparseMatrix<double> lap(n, n);
  for (Eigen::Index a = 0; a < n; ++a) trip.emplace_back(a, a, diag[a]);
  lap.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseMatrix<double> shifted = lap;
  for (Eigen::Index a = 0; a < n; ++a) shifted.coeffRef(a, a) += kShift * mass[a];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) throw SolverError("factorization of the shifted Laplacian failed");

  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, kBlock);
  for (Eigen::Index a = 0; a < n; ++a)
    for (int c = 0; c < kBlock; ++c) x(a, c) = normal(rng);
  // Low-order smooth start vectors speed up convergence for the first modes.
  for (Eigen::Index a = 0; a < n; ++a) x(a, 0) += mu.coordinate(nodes[a], 0);

  SpectralEstimate est;
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    deflate_constants(x, mass);
    Eigen::MatrixXd rhs = mass.asDiagonal() * x;
    Eigen::MatrixXd y = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw SolverError("shifted Laplacian solve failed");
    deflate_constants(y, mass);

    const Eigen::MatrixXd ls = y.transpose() * (lap * y);
    const Eigen::MatrixXd ms = y.transpose() * mass.asDiagonal() * y;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (ls + ls.transpose()),
                                                                   0.5 * (ms + ms.transpose()));
    if (ritz.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz step failed");
    x = y * ritz.eigenvectors();
    const double value = ritz.eigenvalues()[0];
    est.iterations = it;
    est.change = std::abs(value - previous) / std::max(std::abs(value), 1e-300);
    previous = value;
    if (it > 2 && est.change < tolerance) {
      est.eigenvalue = value;
      Eigen::VectorXd v = x.col(0);
      const double norm = std::sqrt((v.array().square() * mass.array()).sum() / mass.sum());
      est.eigenvector.assign(mu.size(), 0.0);
      for (Eigen::Index a = 0; a < n; ++a) est.eigenvector[nodes[a]] = v[a] / norm;
      return est;
    }
  }
  throw SolverError("inverse iteration did not converge");
}

}  // namespace ineqcert
