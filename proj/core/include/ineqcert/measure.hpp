#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ineqcert/expr.hpp"

namespace ineqcert {

/// Boltzmann measure exp(-V) dx / Z discretized on the midpoint grid of the box
/// [-L, L]^d with n cells per axis. Node i has multi-index (i0, i1, i2) with
/// axis 0 varying fastest.
class GridMeasure {
 public:
  int dim() const noexcept { return dim_; }
  int resolution() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> node(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double coordinate(std::size_t i, int axis) const { return coords_[i * dim_ + axis]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& potential() const noexcept { return potential_; }
  std::span<const double> base_point() const noexcept { return {x0_.data(), static_cast<std::size_t>(dim_)}; }

  /// log of the unnormalized mass sum_i exp(-V_i) h^d.
  double log_z() const noexcept { return log_z_; }
  /// Mass in cells touching the box boundary; a truncation diagnostic.
  double boundary_mass() const noexcept { return boundary_mass_; }
  bool truncation_warning() const noexcept { return boundary_mass_ > 0.01; }
  /// Offset applied to every node to keep polar specs off the origin.
  double shift() const noexcept { return shift_; }

  const PotentialSpec& spec() const noexcept { return *spec_; }
  std::shared_ptr<const PotentialSpec> spec_ptr() const noexcept { return spec_; }

  /// Squared distance of node i to the base point.
  double distance_sq(std::size_t i) const;

  std::size_t stride(int axis) const noexcept;
  int axis_index(std::size_t i, int axis) const noexcept;

 private:
  friend GridMeasure discretize(const PotentialSpec&, double, int, std::span<const double>);

  int dim_ = 1;
  int n_ = 0;
  double half_width_ = 0.0;
  double spacing_ = 0.0;
  double shift_ = 0.0;
  double log_z_ = 0.0;
  double boundary_mass_ = 0.0;
  std::array<double, 3> x0_{};
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<double> potential_;
  std::shared_ptr<const PotentialSpec> spec_;
};

/// Relative density h = dnu/dmu at the nodes of a GridMeasure.
struct DensityFunction {
  std::vector<double> values;
};

GridMeasure discretize(const PotentialSpec& spec, double half_width, int n, std::span<const double> x0);

/// Builds nu proportional to exp(log_h) mu, normalized so that sum h w = 1.
DensityFunction density_from_log(const GridMeasure& mu, std::span<const double> log_h);

/// Weighted sum sum_i f_i w_i.
double moment(const GridMeasure& mu, std::span<const double> f);
double moment(const GridMeasure& mu, const std::function<double(std::span<const double>)>& f);

/// H(nu|mu) = sum h log h w with 0 log 0 = 0.
double relative_entropy(const DensityFunction& nu, const GridMeasure& mu);

/// I(nu|mu): sum |grad sqrt h|^2 w, central differences inside the box and
/// one-sided differences on boundary nodes.
double fisher_information(const DensityFunction& nu, const GridMeasure& mu);

/// Edge-based Dirichlet form sum_edges w_e ((g_i - g_j)/h)^2 with edge weight
/// sqrt(w_i w_j). When `axis_weights` is given, the edge along axis k between i
/// and j is further multiplied by axis_weights(midpoint, k).
using AxisWeight = std::function<double(std::span<const double>, int)>;
double dirichlet_form(const GridMeasure& mu, std::span<const double> g, const AxisWeight& axis_weights = {});

double variance(const GridMeasure& mu, std::span<const double> g);

/// Ent_mu(g^2) = sum g^2 log(g^2 / mu(g^2)) w.
double entropy_of_square(const GridMeasure& mu, std::span<const double> g);

struct IntegrabilityResult {
  bool divergent = false;
  /// Grid value of sum exp(delta d^2) w; set only when not divergent.
  double value = 0.0;
  double delta = 0.0;
  std::vector<double> shell_radius;
  /// delta s^2 - min_{|x - x0| = s} V(x) per shell.
  std::vector<double> tail_exponent;
};

/// Gaussian-integrability probe for int exp(delta d^2(x, x0)) dmu. Reports
/// divergence when the tail exponent is nondecreasing and nonnegative on the
/// outer quarter of the shells; otherwise reports the grid integral.
IntegrabilityResult integrability_probe(const GridMeasure& mu, double delta);

/// Bisection for the largest delta in [lo, hi] at which the probe reports finite.
double locate_integrability_threshold(const GridMeasure& mu, double lo, double hi, int iterations = 40);

/// Minimum of V over the sphere of radius s around the base point (sampled,
/// then refined locally in dimension 2).
double shell_minimum(const PotentialSpec& spec, std::span<const double> x0, double s);

}  // namespace ineqcert
