#include "ineqcert/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ineqcert/error.hpp"
#include "ineqcert/parallel.hpp"

namespace ineqcert {

std::size_t GridMeasure::stride(int axis) const noexcept {
  std::size_t s = 1;
  for (int k = 0; k < axis; ++k) s *= static_cast<std::size_t>(n_);
  return s;
}

int GridMeasure::axis_index(std::size_t i, int axis) const noexcept {
  return static_cast<int>((i / stride(axis)) % static_cast<std::size_t>(n_));
}

double GridMeasure::distance_sq(std::size_t i) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    const double dx = coords_[i * dim_ + k] - x0_[k];
    s += dx * dx;
  }
  return s;
}

GridMeasure discretize(const PotentialSpec& spec, double half_width, int n, std::span<const double> x0) {
  if (n < 8) throw ParameterError("grid resolution must be at least 8 cells per axis");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ParameterError("grid half-width must be positive");
  if (static_cast<int>(x0.size()) != spec.dim()) throw InputError("base point dimension does not match the potential");

  GridMeasure mu;
  mu.dim_ = spec.dim();
  mu.n_ = n;
  mu.half_width_ = half_width;
  mu.spacing_ = 2.0 * half_width / n;
  // Odd resolutions put a node on the origin; move polar specs off it.
  mu.shift_ = (spec.uses_polar() && n % 2 == 1) ? 0.25 * mu.spacing_ : 0.0;
  std::copy(x0.begin(), x0.end(), mu.x0_.begin());
  mu.spec_ = std::make_shared<const PotentialSpec>(spec);

  const int d = mu.dim_;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);
  mu.coords_.resize(total * d);
  mu.potential_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (int k = 0; k < d; ++k) {
      const auto idx = static_cast<double>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      mu.coords_[i * d + k] = -half_width + (idx + 0.5) * mu.spacing_ + mu.shift_;
    }
  }

  parallel_for(total, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) mu.potential_[i] = spec.value(mu.node(i));
  });

  const double log_cell = d * std::log(mu.spacing_);
  double vmin = std::numeric_limits<double>::infinity();
  for (double v : mu.potential_) vmin = std::min(vmin, v);
  std::vector<double> shifted(total);
  for (std::size_t i = 0; i < total; ++i) shifted[i] = std::exp(-(mu.potential_[i] - vmin));
  const double mass = pairwise_sum(shifted);
  mu.log_z_ = std::log(mass) - vmin + log_cell;

  mu.weights_.resize(total);
  for (std::size_t i = 0; i < total; ++i) mu.weights_[i] = shifted[i] / mass;
  const double renorm = pairwise_sum(mu.weights_);
  for (double& w : mu.weights_) w /= renorm;

  std::vector<double> boundary(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    for (int k = 0; k < d; ++k) {
      const int a = mu.axis_index(i, k);
      if (a == 0 || a == n - 1) {
        boundary[i] = mu.weights_[i];
        break;
      }
    }
  }
  mu.boundary_mass_ = pairwise_sum(boundary);
  return mu;
}

DensityFunction density_from_log(const GridMeasure& mu, std::span<const double> log_h) {
  if (log_h.size() != mu.size()) throw InputError("density size does not match the grid");
  double top = -std::numeric_limits<double>::infinity();
  for (double l : log_h) top = std::max(top, l);
  if (!std::isfinite(top)) throw DomainError("density has no finite log-value");
  DensityFunction nu;
  nu.values.resize(mu.size());
  std::vector<double> tmp(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    nu.values[i] = std::exp(log_h[i] - top);
    tmp[i] = nu.values[i] * mu.weights()[i];
  }
  const double z = pairwise_sum(tmp);
  for (double& h : nu.values) h /= z;
  return nu;
}

double moment(const GridMeasure& mu, std::span<const double> f) {
  if (f.size() != mu.size()) throw InputError("function size does not match the grid");
  std::vector<double> tmp(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) tmp[i] = f[i] * mu.weights()[i];
  return pairwise_sum(tmp);
}

double moment(const GridMeasure& mu, const std::function<double(std::span<const double>)>& f) {
  std::vector<double> tmp(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) tmp[i] = f(mu.node(i)) * mu.weights()[i];
  return pairwise_sum(tmp);
}

double relative_entropy(const DensityFunction& nu, const GridMeasure& mu) {
  if (nu.values.size() != mu.size()) throw InputError("density size does not match the grid");
  std::vector<double> tmp(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double h = nu.values[i];
    if (h < 0.0 || !std::isfinite(h)) throw DomainError("density must be finite and nonnegative");
    tmp[i] = h > 0.0 ? h * std::log(h) * mu.weights()[i] : 0.0;
  }
  return pairwise_sum(tmp);
}

double fisher_information(const DensityFunction& nu, const GridMeasure& mu) {
  if (nu.values.size() != mu.size()) throw InputError("density size does not match the grid");
  std::vector<double> root(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (nu.values[i] < 0.0 || !std::isfinite(nu.values[i])) throw DomainError("density must be finite and nonnegative");
    root[i] = std::sqrt(nu.values[i]);
  }
  const int n = mu.resolution();
  const double h = mu.spacing();
  std::vector<double> tmp(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double grad2 = 0.0;
    for (int k = 0; k < mu.dim(); ++k) {
      const std::size_t s = mu.stride(k);
      const int a = mu.axis_index(i, k);
      double diff;
      if (a == 0)
        diff = (root[i + s] - root[i]) / h;
      else if (a == n - 1)
        diff = (root[i] - root[i - s]) / h;
      else
        diff = (root[i + s] - root[i - s]) / (2.0 * h);
      grad2 += diff * diff;
    }
    tmp[i] = grad2 * mu.weights()[i];
  }
  return pairwise_sum(tmp);
}

double dirichlet_form(const GridMeasure& mu, std::span<const double> g, const AxisWeight& axis_weights) {
  if (g.size() != mu.size()) throw InputError("function size does not match the grid");
  const int n = mu.resolution();
  const double h2 = mu.spacing() * mu.spacing();
  const auto& w = mu.weights();
  std::vector<double> tmp(mu.size(), 0.0);
  std::array<double, 3> mid{};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < mu.dim(); ++k) {
      if (mu.axis_index(i, k) == n - 1) continue;
      const std::size_t j = i + mu.stride(k);
      const double diff = g[j] - g[i];
      double we = std::sqrt(w[i] * w[j]);
      if (axis_weights) {
        for (int q = 0; q < mu.dim(); ++q) mid[q] = 0.5 * (mu.coordinate(i, q) + mu.coordinate(j, q));
        we *= axis_weights(std::span<const double>(mid.data(), static_cast<std::size_t>(mu.dim())), k);
      }
      acc += we * diff * diff / h2;
    }
    tmp[i] = acc;
  }
  return pairwise_sum(tmp);
}

double variance(const GridMeasure& mu, std::span<const double> g) {
  const double m = moment(mu, g);
  std::vector<double> centered(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) centered[i] = (g[i] - m) * (g[i] - m);
  return moment(mu, centered);
}

double entropy_of_square(const GridMeasure& mu, std::span<const double> g) {
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sq[i] = g[i] * g[i];
  const double m = moment(mu, sq);
  if (!(m > 0.0)) return 0.0;
  std::vector<double> tmp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    tmp[i] = sq[i] > 0.0 ? sq[i] * std::log(sq[i] / m) * mu.weights()[i] : 0.0;
  return pairwise_sum(tmp);
}

double shell_minimum(const PotentialSpec& spec, std::span<const double> x0, double s) {
  const int d = spec.dim();
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 3> p{};
  auto eval = [&](const std::array<double, 3>& dir) {
    for (int k = 0; k < d; ++k) p[k] = x0[k] + s * dir[k];
    try {
      return spec.value(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (d == 1) {
    best = std::min(eval({1.0, 0.0, 0.0}), eval({-1.0, 0.0, 0.0}));
  } else if (d == 2) {
    constexpr int kAngles = 2048;
    const double step = 2.0 * std::numbers::pi / kAngles;
    double best_theta = 0.0;
    for (int j = 0; j < kAngles; ++j) {
      const double th = j * step;
      const double v = eval({std::cos(th), std::sin(th), 0.0});
      if (v < best) {
        best = v;
        best_theta = th;
      }
    }
    // golden-section refinement inside the bracketing cells
    double lo = best_theta - step, hi = best_theta + step;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - invphi * (hi - lo), b = lo + invphi * (hi - lo);
    double fa = eval({std::cos(a), std::sin(a), 0.0}), fb = eval({std::cos(b), std::sin(b), 0.0});
    for (int it = 0; it < 60; ++it) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - invphi * (hi - lo);
        fa = eval({std::cos(a), std::sin(a), 0.0});
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + invphi * (hi - lo);
        fb = eval({std::cos(b), std::sin(b), 0.0});
      }
    }
    best = std::min({best, fa, fb});
  } else {
    // Fibonacci sphere
    constexpr int kPoints = 4096;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < kPoints; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / kPoints;
      const double rho = std::sqrt(1.0 - z * z);
      const double phi = golden * j;
      best = std::min(best, eval({rho * std::cos(phi), rho * std::sin(phi), z}));
    }
  }
  return best;
}

IntegrabilityResult integrability_probe(const GridMeasure& mu, double delta) {
  constexpr int kShells = 128;
  IntegrabilityResult res;
  res.delta = delta;
  res.shell_radius.resize(kShells);
  res.tail_exponent.resize(kShells);
  std::vector<double> scale(kShells);
  parallel_for(kShells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const double s = mu.half_width() * static_cast<double>(j + 1) / kShells;
      const double vmin = shell_minimum(mu.spec(), mu.base_point(), s);
      res.shell_radius[j] = s;
      res.tail_exponent[j] = delta * s * s - vmin;
      scale[j] = std::max({1.0, std::abs(vmin), delta * s * s});
    }
  });

  const int first = (3 * kShells) / 4;
  bool divergent = true;
  for (int j = first; j < kShells && divergent; ++j) {
    const double tol = 1e-9 * scale[j];
    if (res.tail_exponent[j] < -tol) divergent = false;
    if (j + 1 < kShells && res.tail_exponent[j + 1] < res.tail_exponent[j] - tol) divergent = false;
  }
  res.divergent = divergent;
  if (!divergent) {
    std::vector<double> f(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) f[i] = std::exp(delta * mu.distance_sq(i));
    res.value = moment(mu, f);
  }
  return res;
}

double locate_integrability_threshold(const GridMeasure& mu, double lo, double hi, int iterations) {
  if (!integrability_probe(mu, hi).divergent) return hi;
  if (integrability_probe(mu, lo).divergent) return lo;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (integrability_probe(mu, mid).divergent)
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

}  // namespace ineqcert
