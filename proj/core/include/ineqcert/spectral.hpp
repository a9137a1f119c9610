#pragma once

#include <vector>

#include "ineqcert/measure.hpp"

namespace ineqcert {

struct SpectralEstimate {
  /// Smallest nonzero eigenvalue of the grid Dirichlet form against mu.
  double eigenvalue = 0.0;
  int iterations = 0;
  /// Relative change of the Ritz value in the last iteration.
  double change = 0.0;
  /// Eigenvector at the nodes (mean zero, unit mu-variance).
  std::vector<double> eigenvector;
};

/// Block inverse iteration (shift-invert with Rayleigh-Ritz) for the
/// generalized problem L g = lambda M g, where L is the edge-weighted graph
/// Laplacian of dirichlet_form() and M = diag(weights). Constants are
/// deflated. Throws SolverError on non-convergence.
SpectralEstimate spectral_gap(const GridMeasure& mu, const AxisWeight& axis_weights = {}, int max_iterations = 400,
                              double tolerance = 1e-12);

}  // namespace ineqcert
